#pragma once

// Simply typed lambda calculus and the erasure of box-calculus objects into
// it: code types become curried function types, quotations nested
// abstractions and unquotations application spines.

#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmtt/error.hpp"
#include "cmtt/subst.hpp"
#include "cmtt/syntax.hpp"
#include "cmtt/typecheck.hpp"

namespace cmtt::stlc {

struct TypeNode;

class Type {
 public:
  explicit Type(std::shared_ptr<const TypeNode> n) : node_(std::move(n)) {}
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
struct TypeNode {
  std::variant<BaseType, ArrowType> v;
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

inline bool operator==(const Type& a, const Type& b) {
  return a.visit(overloaded{
      [&](const BaseType& x) {
        const auto* y = b.as<BaseType>();
        return y && y->name == x.name;
      },
      [&](const ArrowType& x) {
        const auto* y = b.as<ArrowType>();
        return y && x.dom == y->dom && x.cod == y->cod;
      },
  });
}

struct TermNode;

class Term {
 public:
  explicit Term(std::shared_ptr<const TermNode> n) : node_(std::move(n)) {}
  template <class T>
  const T* as() const;
  template <class F>
  decltype(auto) visit(F&& f) const;

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
struct TermNode {
  std::variant<Var, Lam, App> v;
};

template <class T>
const T* Term::as() const {
  return std::get_if<T>(&node_->v);
}
template <class F>
decltype(auto) Term::visit(F&& f) const {
  return std::visit(std::forward<F>(f), node_->v);
}

inline Term var(Name x) { return Term(std::make_shared<const TermNode>(TermNode{Var{std::move(x)}})); }
inline Term lam(Name x, Type t, Term b) {
  return Term(std::make_shared<const TermNode>(TermNode{Lam{std::move(x), std::move(t), std::move(b)}}));
}
inline Term app(Term f, Term a) {
  return Term(std::make_shared<const TermNode>(TermNode{App{std::move(f), std::move(a)}}));
}

struct Binding {
  Name name;
  Type type;
};
using Context = std::vector<Binding>;

// ---------------------------------------------------------------------------
// Printing

inline std::string format(const Type& t, bool top = true) {
  return t.visit(overloaded{
      [](const BaseType& b) { return b.name; },
      [&](const ArrowType& a) {
        std::string s = format(a.dom, false) + " -> " + format(a.cod, true);
        return top ? s : "(" + s + ")";
      },
  });
}

inline std::string format(const Term& m, int pos = 0) {
  return m.visit(overloaded{
      [](const Var& v) { return v.name; },
      [&](const Lam& l) {
        std::string s = "\\" + l.var + ":" + format(l.annot) + ". " + format(l.body, 0);
        return pos ? "(" + s + ")" : s;
      },
      [&](const App& a) {
        std::string s = format(a.fun, 1) + " " + format(a.arg, 2);
        return pos == 2 ? "(" + s + ")" : s;
      },
  });
}

inline std::string format(const Context& ctx) {
  std::string s = "{";
  for (std::size_t k = 0; k < ctx.size(); ++k) {
    if (k) s += ", ";
    s += ctx[k].name + ":" + format(ctx[k].type);
  }
  return s + "}";
}

// ---------------------------------------------------------------------------
// Free variables, substitution, alpha-equivalence

inline NameSet free_vars(const Term& m) {
  return m.visit(overloaded{
      [](const Var& v) { return NameSet{v.name}; },
      [](const Lam& l) {
        NameSet s = free_vars(l.body);
        s.erase(l.var);
        return s;
      },
      [](const App& a) {
        NameSet s = free_vars(a.fun);
        s.merge(free_vars(a.arg));
        return s;
      },
  });
}

inline void collect_names(const Term& m, NameSet& out) {
  m.visit(overloaded{
      [&](const Var& v) { out.insert(v.name); },
      [&](const Lam& l) {
        out.insert(l.var);
        collect_names(l.body, out);
      },
      [&](const App& a) {
        collect_names(a.fun, out);
        collect_names(a.arg, out);
      },
  });
}

inline Term subst(const Term& m, const Name& x, const Term& n) {
  return m.visit(overloaded{
      [&](const Var& v) { return v.name == x ? n : m; },
      [&](const Lam& l) {
        if (l.var == x) return m;
        NameSet fv = free_vars(n);
        if (!fv.contains(l.var)) return lam(l.var, l.annot, subst(l.body, x, n));
        NameSet avoid = fv;
        collect_names(l.body, avoid);
        avoid.insert(x);
        Name fresh = fresh_name(l.var, avoid);
        return lam(fresh, l.annot, subst(subst(l.body, l.var, var(fresh)), x, n));
      },
      [&](const App& a) { return app(subst(a.fun, x, n), subst(a.arg, x, n)); },
  });
}

namespace detail {
inline bool alpha(const Term& a, const Term& b, std::vector<Name>& la, std::vector<Name>& lb) {
  if (const auto* x = a.as<Var>()) {
    const auto* y = b.as<Var>();
    return y && cmtt::detail::same_binder(la, x->name, lb, y->name);
  }
  if (const auto* x = a.as<Lam>()) {
    const auto* y = b.as<Lam>();
    if (!y || !(x->annot == y->annot)) return false;
    la.push_back(x->var);
    lb.push_back(y->var);
    bool ok = alpha(x->body, y->body, la, lb);
    la.pop_back();
    lb.pop_back();
    return ok;
  }
  const auto& x = *a.as<App>();
  const auto* y = b.as<App>();
  return y && alpha(x.fun, y->fun, la, lb) && alpha(x.arg, y->arg, la, lb);
}
}  // namespace detail

inline bool alpha_equal(const Term& a, const Term& b) {
  std::vector<Name> la, lb;
  return detail::alpha(a, b, la, lb);
}

// ---------------------------------------------------------------------------
// Typing

inline Type stlc_synth(const Context& ctx, const Term& m) {
  return m.visit(overloaded{
      [&](const Var& v) -> Type {
        for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
          if (it->name == v.name) return it->type;
        throw Error(ErrorKind::UnboundVariable, "variable " + v.name + " is not bound", "Var");
      },
      [&](const Lam& l) {
        Context inner = ctx;
        inner.push_back({l.var, l.annot});
        return arrow(l.annot, stlc_synth(inner, l.body));
      },
      [&](const App& a) -> Type {
        Type f = stlc_synth(ctx, a.fun);
        const auto* fa = f.as<ArrowType>();
        if (!fa) throw Error(ErrorKind::NotAFunction, "expected a function, found " + format(f), "App");
        Type x = stlc_synth(ctx, a.arg);
        if (!(fa->dom == x))
          throw Error(ErrorKind::TypeMismatch, "argument has type " + format(x) + " but " + format(fa->dom) + " was expected",
                      "App");
        return fa->cod;
      },
  });
}

// ---------------------------------------------------------------------------
// Reduction

inline std::optional<Term> step(const Term& m) {
  return m.visit(overloaded{
      [](const Var&) -> std::optional<Term> { return std::nullopt; },
      [](const Lam& l) -> std::optional<Term> {
        if (auto b = step(l.body)) return lam(l.var, l.annot, *b);
        return std::nullopt;
      },
      [](const App& a) -> std::optional<Term> {
        if (const auto* l = a.fun.as<Lam>()) return subst(l->body, l->var, a.arg);
        if (auto f = step(a.fun)) return app(*f, a.arg);
        if (auto x = step(a.arg)) return app(a.fun, *x);
        return std::nullopt;
      },
  });
}

/// All one-step reducts.
inline std::vector<Term> reducts(const Term& m) {
  std::vector<Term> out;
  m.visit(overloaded{
      [](const Var&) {},
      [&](const Lam& l) {
        for (auto& b : reducts(l.body)) out.push_back(lam(l.var, l.annot, b));
      },
      [&](const App& a) {
        if (const auto* l = a.fun.as<Lam>()) out.push_back(subst(l->body, l->var, a.arg));
        for (auto& f : reducts(a.fun)) out.push_back(app(f, a.arg));
        for (auto& x : reducts(a.arg)) out.push_back(app(a.fun, x));
      },
  });
  return out;
}

inline Term normalize(const Term& m, std::size_t fuel = 100000) {
  Term cur = m;
  for (std::size_t k = 0;; ++k) {
    auto n = step(cur);
    if (!n) return cur;
    if (k == fuel) throw Error(ErrorKind::FuelExhausted, "no normal form within " + std::to_string(fuel) + " steps");
    cur = *n;
  }
}

/// Whether `n` is reachable from `m` in at most `bound` beta steps (breadth
/// first, up to alpha).
inline bool stlc_steps_to(const Term& m, const Term& n, std::size_t bound) {
  std::deque<std::pair<Term, std::size_t>> queue{{m, 0}};
  std::set<std::string> seen;
  while (!queue.empty()) {
    auto [cur, depth] = queue.front();
    queue.pop_front();
    if (alpha_equal(cur, n)) return true;
    if (depth == bound) continue;
    for (auto& r : reducts(cur))
      if (seen.insert(format(r)).second) queue.emplace_back(r, depth + 1);
  }
  return false;
}

/// Normal-form mode: both terms reduce to alpha-equal normal forms.
inline bool joinable(const Term& a, const Term& b, std::size_t fuel = 100000) {
  return alpha_equal(normalize(a, fuel), normalize(b, fuel));
}

// ---------------------------------------------------------------------------
// Erasure

inline Type erase(const cmtt::Type& t) {
  return t.visit(overloaded{
      [](const cmtt::BaseType& b) { return base(b.name); },
      [](const cmtt::ArrowType& a) { return arrow(erase(a.dom), erase(a.cod)); },
      [](const cmtt::ModalType& m) {
        Type out = erase(m.body);
        for (auto it = m.ctx.rbegin(); it != m.ctx.rend(); ++it) {
          if (std::holds_alternative<CVar>(*it))
            throw Error(ErrorKind::NotErasable, "context variable in a code type", "Erase");
          out = arrow(erase(std::get<cmtt::Type>(*it)), out);
        }
        return out;
      },
      [](const cmtt::ForallType&) -> Type {
        throw Error(ErrorKind::NotErasable, "polymorphic context types have no simply typed image", "Erase");
      },
  });
}

inline Term erase(const cmtt::Term& m) {
  return m.visit(overloaded{
      [](const cmtt::Var& v) { return var(v.name); },
      [](const cmtt::Const& c) { return var(c.name); },
      [](const cmtt::Lam& l) { return lam(l.var, erase(l.annot), erase(l.body)); },
      [](const cmtt::App& a) { return app(erase(a.fun), erase(a.arg)); },
      [](const cmtt::Quo& q) {
        Term out = erase(q.body);
        for (auto it = q.ctx.rbegin(); it != q.ctx.rend(); ++it) {
          if (it->is_weakening()) throw Error(ErrorKind::NotErasable, "weakening binding in a quotation", "Erase");
          out = lam(it->name, erase(std::get<cmtt::Type>(it->sort)), out);
        }
        return out;
      },
      [](const cmtt::Unq& u) {
        Term out = erase(u.code);
        for (const auto& a : u.args) out = app(out, erase(a));
        return out;
      },
      [](const cmtt::CAbs&) -> Term {
        throw Error(ErrorKind::NotErasable, "context abstraction has no simply typed image", "Erase");
      },
      [](const cmtt::CApp&) -> Term {
        throw Error(ErrorKind::NotErasable, "context application has no simply typed image", "Erase");
      },
  });
}

/// Flattens the stack into one context; defined only when the domains of
/// the stack's contexts are pairwise disjoint.
inline Context erase(const ContextStack& stack) {
  Context out;
  NameSet seen;
  for (const auto& ctx : stack) {
    for (const auto& b : ctx) {
      if (!seen.insert(b.name).second)
        throw Error(ErrorKind::StackDomainsOverlap, "variable " + b.name + " is bound at two levels", "Erase");
      if (b.is_weakening()) throw Error(ErrorKind::NotErasable, "weakening binding in the stack", "Erase");
      out.push_back({b.name, erase(std::get<cmtt::Type>(b.sort))});
    }
  }
  return out;
}

/// Typings of the built-in constants, placed in front of erased contexts.
inline Context constant_context() {
  Context out;
  for (const char* c : {"true", "false", "if"}) out.push_back({c, erase(*constant_type(c))});
  return out;
}

struct Judgment {
  Context ctx;
  Term term;
  Type type;
};

/// Erasure of a whole judgment. The stack must have disjoint domains; the
/// term's binders are renamed apart from each other and from the stack first
/// so that flattening the levels cannot capture.
inline Judgment erase(const cmtt::Judgment& j) {
  Context ctx = constant_context();
  Context flat = erase(j.stack);
  ctx.insert(ctx.end(), flat.begin(), flat.end());
  NameSet avoid = cmtt::all_names(j.term);
  for (const auto& b : flat) avoid.insert(b.name);
  Term t = erase(cmtt::refresh_binders(j.term, avoid));
  return {std::move(ctx), std::move(t), erase(j.type)};
}

/// Term erasure after renaming every binder apart.
inline Term erase_refreshed(const cmtt::Term& m, NameSet avoid = {}) {
  cmtt::collect_names(m, avoid);
  return erase(cmtt::refresh_binders(m, avoid));
}

}  // namespace cmtt::stlc
