#pragma once

// The Fitch-style linear-temporal calculus: next-modality types, terms with
// an optional type annotation per node, and synthesis over a past stack
// (back() is the current stage) and a future stack (front() is the next
// stage).

#include <algorithm>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmtt/error.hpp"
#include "cmtt/syntax.hpp"

namespace cmtt::circ {

struct TypeNode;

class Type {
 public:
  explicit Type(std::shared_ptr<const TypeNode> node) : node_(std::move(node)) {}

  template <class T>
  const T* as() const;
  template <class F>
  decltype(auto) visit(F&& f) const;

 private:
  std::shared_ptr<const TypeNode> node_;
};

struct BaseType {
  Name name;
};
struct ArrowType {
  Type dom;
  Type cod;
};
struct NextType {
  Type body;
};

struct TypeNode {
  std::variant<BaseType, ArrowType, NextType> v;
};

template <class T>
const T* Type::as() const {
  return std::get_if<T>(&node_->v);
}
template <class F>
decltype(auto) Type::visit(F&& f) const {
  return std::visit(std::forward<F>(f), node_->v);
}

inline Type base(Name n) { return Type(std::make_shared<const TypeNode>(TypeNode{BaseType{std::move(n)}})); }
inline Type arrow(Type d, Type c) {
  return Type(std::make_shared<const TypeNode>(TypeNode{ArrowType{std::move(d), std::move(c)}}));
}
inline Type next(Type b) { return Type(std::make_shared<const TypeNode>(TypeNode{NextType{std::move(b)}})); }

inline bool operator==(const Type& a, const Type& b) {
  return a.visit(overloaded{
      [&](const BaseType& x) {
        const auto* y = b.as<BaseType>();
        return y && x.name == y->name;
      },
      [&](const ArrowType& x) {
        const auto* y = b.as<ArrowType>();
        return y && x.dom == y->dom && x.cod == y->cod;
      },
      [&](const NextType& x) {
        const auto* y = b.as<NextType>();
        return y && x.body == y->body;
      },
  });
}

struct Binding {
  Name name;
  Type type;
};
using Context = std::vector<Binding>;
using PastStack = std::vector<Context>;
using FutureStack = std::vector<Context>;

struct TermNode;

class Term {
 public:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

  template <class T>
  const T* as() const;
  template <class F>
  decltype(auto) visit(F&& f) const;
  const std::optional<Type>& annotation() const;

 private:
  std::shared_ptr<const TermNode> node_;
};

struct Var {
  Name name;
};
struct Lam {
  Name var;
  Type annot;
  Term body;
};
struct App {
  Term fun;
  Term arg;
};
struct Quo {
  Term body;
};
struct Unq {
  Term body;
};

struct TermNode {
  std::variant<Var, Lam, App, Quo, Unq> v;
  std::optional<Type> ann;
};

template <class T>
const T* Term::as() const {
  return std::get_if<T>(&node_->v);
}
template <class F>
decltype(auto) Term::visit(F&& f) const {
  return std::visit(std::forward<F>(f), node_->v);
}
inline const std::optional<Type>& Term::annotation() const { return node_->ann; }

namespace detail {
template <class N>
Term make(N n, std::optional<Type> ann = std::nullopt) {
  return Term(std::make_shared<const TermNode>(TermNode{std::move(n), std::move(ann)}));
}
}  // namespace detail

inline Term var(Name x, std::optional<Type> ann = std::nullopt) { return detail::make(Var{std::move(x)}, std::move(ann)); }
inline Term lam(Name x, Type t, Term body, std::optional<Type> ann = std::nullopt) {
  return detail::make(Lam{std::move(x), std::move(t), std::move(body)}, std::move(ann));
}
inline Term app(Term f, Term a, std::optional<Type> ann = std::nullopt) {
  return detail::make(App{std::move(f), std::move(a)}, std::move(ann));
}
inline Term quo(Term body, std::optional<Type> ann = std::nullopt) { return detail::make(Quo{std::move(body)}, std::move(ann)); }
inline Term unq(Term body, std::optional<Type> ann = std::nullopt) { return detail::make(Unq{std::move(body)}, std::move(ann)); }

// ---------------------------------------------------------------------------
// Queries

/// Number of next-stage contexts a term consumes beyond those it returns:
/// the future stack needed to type it with no explicit future.
inline unsigned need(const Term& m) {
  return m.visit(overloaded{
      [](const Var&) { return 0u; },
      [](const Lam& l) { return need(l.body); },
      [](const App& a) { return std::max(need(a.fun), need(a.arg)); },
      [](const Quo& q) { return need(q.body) + 1; },
      [](const Unq& u) {
        unsigned n = need(u.body);
        return n == 0 ? 0u : n - 1;
      },
  });
}

inline void collect_names(const Type& t, NameSet& out) {
  t.visit(overloaded{
      [&](const BaseType& b) { out.insert(b.name); },
      [&](const ArrowType& a) {
        collect_names(a.dom, out);
        collect_names(a.cod, out);
      },
      [&](const NextType& n) { collect_names(n.body, out); },
  });
}

inline void collect_names(const Term& m, NameSet& out) {
  m.visit(overloaded{
      [&](const Var& v) { out.insert(v.name); },
      [&](const Lam& l) {
        out.insert(l.var);
        collect_names(l.annot, out);
        collect_names(l.body, out);
      },
      [&](const App& a) {
        collect_names(a.fun, out);
        collect_names(a.arg, out);
      },
      [&](const Quo& q) { collect_names(q.body, out); },
      [&](const Unq& u) { collect_names(u.body, out); },
  });
}

inline void collect_names(const Context& ctx, NameSet& out) {
  for (const auto& b : ctx) {
    out.insert(b.name);
    collect_names(b.type, out);
  }
}

inline const Binding* lookup(const Context& ctx, const Name& x) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->name == x) return &*it;
  return nullptr;
}

/// Removes all annotations.
inline Term strip(const Term& m) {
  return m.visit(overloaded{
      [](const Var& v) { return var(v.name); },
      [](const Lam& l) { return lam(l.var, l.annot, strip(l.body)); },
      [](const App& a) { return app(strip(a.fun), strip(a.arg)); },
      [](const Quo& q) { return quo(strip(q.body)); },
      [](const Unq& u) { return unq(strip(u.body)); },
  });
}

/// Structural equality including annotations and binder names.
inline bool identical(const Term& a, const Term& b) {
  const auto& aa = a.annotation();
  const auto& ba = b.annotation();
  if (aa.has_value() != ba.has_value()) return false;
  if (aa && !(*aa == *ba)) return false;
  return a.visit(overloaded{
      [&](const Var& x) {
        const auto* y = b.as<Var>();
        return y && x.name == y->name;
      },
      [&](const Lam& x) {
        const auto* y = b.as<Lam>();
        return y && x.var == y->var && x.annot == y->annot && identical(x.body, y->body);
      },
      [&](const App& x) {
        const auto* y = b.as<App>();
        return y && identical(x.fun, y->fun) && identical(x.arg, y->arg);
      },
      [&](const Quo& x) {
        const auto* y = b.as<Quo>();
        return y && identical(x.body, y->body);
      },
      [&](const Unq& x) {
        const auto* y = b.as<Unq>();
        return y && identical(x.body, y->body);
      },
  });
}

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline void print_type(std::ostream& os, const Type& t, bool top) {
  t.visit(overloaded{
      [&](const BaseType& b) { os << b.name; },
      [&](const ArrowType& a) {
        if (!top) os << '(';
        print_type(os, a.dom, false);
        os << " -> ";
        print_type(os, a.cod, true);
        if (!top) os << ')';
      },
      [&](const NextType& n) {
        os << "next ";
        print_type(os, n.body, false);
      },
  });
}

enum class Pos { Top, Fun, Arg };

inline void print_term(std::ostream& os, const Term& m, Pos pos) {
  m.visit(overloaded{
      [&](const Var& v) { os << v.name; },
      [&](const Lam& l) {
        if (pos != Pos::Top) os << '(';
        os << '\\' << l.var << ':';
        print_type(os, l.annot, true);
        os << ". ";
        print_term(os, l.body, Pos::Top);
        if (pos != Pos::Top) os << ')';
      },
      [&](const App& a) {
        if (pos == Pos::Arg) os << '(';
        print_term(os, a.fun, Pos::Fun);
        os << ' ';
        print_term(os, a.arg, Pos::Arg);
        if (pos == Pos::Arg) os << ')';
      },
      [&](const Quo& q) {
        os << '`';
        print_term(os, q.body, Pos::Arg);
      },
      [&](const Unq& u) {
        os << '~';
        print_term(os, u.body, Pos::Arg);
      },
  });
}

}  // namespace detail

inline std::string format(const Type& t) {
  std::ostringstream os;
  detail::print_type(os, t, true);
  return os.str();
}

inline std::string format(const Term& m) {
  std::ostringstream os;
  detail::print_term(os, m, detail::Pos::Top);
  return os.str();
}

inline std::string format(const Context& ctx) {
  std::ostringstream os;
  os << '{';
  for (std::size_t k = 0; k < ctx.size(); ++k) {
    if (k) os << ", ";
    os << ctx[k].name << ':' << format(ctx[k].type);
  }
  os << '}';
  return os.str();
}

inline std::string format(const std::vector<Context>& stack) {
  if (stack.empty()) return ".";
  std::string out;
  for (std::size_t k = 0; k < stack.size(); ++k) {
    if (k) out += "; ";
    out += format(stack[k]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthesis

struct Synthesis {
  Type type;
  Term annotated;
};

namespace detail {

class Synth {
 public:
  Synthesis run(const PastStack& past, const FutureStack& future, const Term& m) {
    return m.visit(overloaded{
        [&](const Var& v) -> Synthesis {
          if (past.empty()) fail(ErrorKind::UnboundVariable, "variable " + v.name + " with no current stage", "Var", past, future);
          const Binding* b = lookup(past.back(), v.name);
          if (!b) fail(ErrorKind::UnboundVariable, "variable " + v.name + " is not bound at the current stage", "Var", past, future);
          return {b->type, var(v.name, b->type)};
        },
        [&](const Lam& l) -> Synthesis {
          if (past.empty()) fail(ErrorKind::EmptyPast, "abstraction with no current stage", "Abs", past, future);
          PastStack inner = past;
          Context& cur = inner.back();
          // A binder already bound at this stage is renamed so that every
          // stage keeps a duplicate-free domain.
          Name x = l.var;
          Term body = l.body;
          if (lookup(cur, x)) {
            NameSet avoid;
            for (const auto& ctx : past) collect_names(ctx, avoid);
            collect_names(l.body, avoid);
            x = fresh_name(l.var, avoid);
            body = rename(l.body, l.var, x);
          }
          cur.push_back({x, l.annot});
          path_.push_back(0);
          Synthesis s = run(inner, future, body);
          path_.pop_back();
          Type t = arrow(l.annot, s.type);
          return {t, lam(x, l.annot, s.annotated, t)};
        },
        [&](const App& a) -> Synthesis {
          if (past.empty()) fail(ErrorKind::EmptyPast, "application with no current stage", "App", past, future);
          path_.push_back(0);
          Synthesis f = run(past, future, a.fun);
          path_.pop_back();
          const auto* fa = f.type.as<ArrowType>();
          if (!fa) fail(ErrorKind::NotAFunction, "expected a function, found " + format(f.type), "App", past, future);
          path_.push_back(1);
          Synthesis x = run(past, future, a.arg);
          path_.pop_back();
          if (!(fa->dom == x.type))
            fail(ErrorKind::TypeMismatch, "argument has type " + format(x.type) + " but " + format(fa->dom) + " was expected",
                 "App", past, future);
          return {fa->cod, app(f.annotated, x.annotated, fa->cod)};
        },
        [&](const Quo& q) -> Synthesis {
          if (future.empty()) fail(ErrorKind::EmptyFuture, "quotation with no next stage", "Quo", past, future);
          PastStack p = past;
          p.push_back(future.front());
          FutureStack f(future.begin() + 1, future.end());
          path_.push_back(0);
          Synthesis s = run(p, f, q.body);
          path_.pop_back();
          Type t = next(s.type);
          return {t, quo(s.annotated, t)};
        },
        [&](const Unq& u) -> Synthesis {
          if (past.empty()) fail(ErrorKind::EmptyPast, "unquotation with no current stage", "Unq", past, future);
          PastStack p(past.begin(), past.end() - 1);
          FutureStack f = future;
          f.insert(f.begin(), past.back());
          path_.push_back(0);
          Synthesis s = run(p, f, u.body);
          path_.pop_back();
          const auto* n = s.type.as<NextType>();
          if (!n) fail(ErrorKind::NotACode, "expected a next-stage type, found " + format(s.type), "Unq", past, future);
          return {n->body, unq(s.annotated, n->body)};
        },
    });
  }

 private:
  [[noreturn]] void fail(ErrorKind k, const std::string& msg, const std::string& rule, const PastStack& past,
                         const FutureStack& future) const {
    throw Error(k, msg, rule, path_, format(past) + " | " + format(future));
  }

  // Renames free occurrences of `from` at the binder's own stage.
  static Term rename(const Term& m, const Name& from, const Name& to, int stage = 0) {
    return m.visit(overloaded{
        [&](const Var& v) { return stage == 0 && v.name == from ? var(to) : m; },
        [&](const Lam& l) {
          if (stage == 0 && l.var == from) return m;
          return lam(l.var, l.annot, rename(l.body, from, to, stage));
        },
        [&](const App& a) { return app(rename(a.fun, from, to, stage), rename(a.arg, from, to, stage)); },
        [&](const Quo& q) { return quo(rename(q.body, from, to, stage + 1)); },
        [&](const Unq& u) { return unq(rename(u.body, from, to, stage - 1)); },
    });
  }

  std::vector<unsigned> path_;
};

}  // namespace detail

/// Synthesizes the type of `m` and returns `m` with every node annotated.
/// Binders that shadow a name of the same stage are renamed in the result.
inline Synthesis circ_synth(const PastStack& past, const FutureStack& future, const Term& m) {
  return detail::Synth().run(past, future, m);
}

/// The future stack used when none is given: `need(m)` empty contexts.
inline FutureStack default_future(const Term& m) { return FutureStack(need(m)); }

}  // namespace cmtt::circ
