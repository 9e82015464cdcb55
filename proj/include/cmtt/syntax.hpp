#pragma once

// Abstract syntax shared by the box calculi (with and without polymorphic
// contexts): types, type sequences, terms, term sequences, contexts and
// context stacks, plus the structural queries every other module needs
// (free variables per level, free context variables, alpha-equivalence,
// deterministic freshening).

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace cmtt {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
overloaded(Fs...) -> overloaded<Fs...>;

using Name = std::string;
using NameSet = std::set<Name>;

/// A context variable occurring as an entry of a type sequence or as the
/// sort of a weakening binding `i : g`.
struct CVar {
  Name name;
  friend bool operator==(const CVar&, const CVar&) = default;
};

struct TypeNode;

class Type {
 public:
  explicit Type(std::shared_ptr<const TypeNode> node) : node_(std::move(node)) {}

  const TypeNode& node() const { return *node_; }
  template <class T>
  const T* as() const;
  template <class F>
  decltype(auto) visit(F&& f) const;

 private:
  std::shared_ptr<const TypeNode> node_;
};

using SeqEntry = std::variant<Type, CVar>;
using TypeSeq = std::vector<SeqEntry>;

struct BaseType {
  Name name;
};
struct ArrowType {
  Type dom;
  Type cod;
};
struct ModalType {
  TypeSeq ctx;
  Type body;
};
struct ForallType {
  Name cvar;
  Type body;
};

struct TypeNode {
  std::variant<BaseType, ArrowType, ModalType, ForallType> v;
};

template <class T>
const T* Type::as() const {
  return std::get_if<T>(&node_->v);
}
template <class F>
decltype(auto) Type::visit(F&& f) const {
  return std::visit(std::forward<F>(f), node_->v);
}

inline Type base(Name name) {
  return Type(std::make_shared<const TypeNode>(TypeNode{BaseType{std::move(name)}}));
}
inline Type arrow(Type dom, Type cod) {
  return Type(std::make_shared<const TypeNode>(TypeNode{ArrowType{std::move(dom), std::move(cod)}}));
}
inline Type modal(TypeSeq ctx, Type body) {
  return Type(std::make_shared<const TypeNode>(TypeNode{ModalType{std::move(ctx), std::move(body)}}));
}
inline Type forall(Name cvar, Type body) {
  return Type(std::make_shared<const TypeNode>(TypeNode{ForallType{std::move(cvar), std::move(body)}}));
}

/// One context entry: `x : T` when `sort` holds a Type, `i : g` (a weakening
/// variable) when it holds a CVar.
struct Binding {
  Name name;
  SeqEntry sort;

  bool is_weakening() const { return std::holds_alternative<CVar>(sort); }
};

inline Binding term_binding(Name x, Type ty) { return Binding{std::move(x), std::move(ty)}; }
inline Binding weak_binding(Name i, Name cvar) { return Binding{std::move(i), CVar{std::move(cvar)}}; }

using Context = std::vector<Binding>;
/// back() is level 1, the object-level context.
using ContextStack = std::vector<Context>;

struct TermNode;

class Term {
 public:
  explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

  const TermNode& node() const { return *node_; }
  template <class T>
  const T* as() const;
  template <class F>
  decltype(auto) visit(F&& f) const;
  bool same_node(const Term& other) const { return node_ == other.node_; }

 private:
  std::shared_ptr<const TermNode> node_;
};

/// Argument sequences of unquotation. A weakening variable occurrence is a
/// Var entry whose name is bound by a weakening binding; which one it is
/// gets decided by the binding in scope, never by the syntax tree.
using TermSeq = std::vector<Term>;

struct Var {
  Name name;
};
/// Global constants (`true`, `false`, `if`) drawn from a signature; they are
/// closed at every level and inert under all meta operations.
struct Const {
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
  Context ctx;
  Term body;
};
struct Unq {
  unsigned level;
  Term code;
  TermSeq args;
};
struct CAbs {
  Name cvar;
  Term body;
};
struct CApp {
  Term code;
  TypeSeq tys;
};

struct TermNode {
  std::variant<Var, Const, Lam, App, Quo, Unq, CAbs, CApp> v;
};

template <class T>
const T* Term::as() const {
  return std::get_if<T>(&node_->v);
}
template <class F>
decltype(auto) Term::visit(F&& f) const {
  return std::visit(std::forward<F>(f), node_->v);
}

namespace detail {
template <class N>
Term make_term(N n) {
  return Term(std::make_shared<const TermNode>(TermNode{std::move(n)}));
}
}  // namespace detail

inline Term var(Name x) { return detail::make_term(Var{std::move(x)}); }
inline Term constant(Name c) { return detail::make_term(Const{std::move(c)}); }
inline Term lam(Name x, Type annot, Term body) {
  return detail::make_term(Lam{std::move(x), std::move(annot), std::move(body)});
}
inline Term app(Term f, Term a) { return detail::make_term(App{std::move(f), std::move(a)}); }
inline Term quo(Context ctx, Term body) { return detail::make_term(Quo{std::move(ctx), std::move(body)}); }
inline Term unq(unsigned level, Term code, TermSeq args) {
  return detail::make_term(Unq{level, std::move(code), std::move(args)});
}
inline Term cabs(Name cvar, Term body) { return detail::make_term(CAbs{std::move(cvar), std::move(body)}); }
inline Term capp(Term code, TypeSeq tys) { return detail::make_term(CApp{std::move(code), std::move(tys)}); }

/// A typing judgment `stack |- term : type`.
struct Judgment {
  ContextStack stack;
  Term term;
  Type type;
};

// ---------------------------------------------------------------------------
// Names

/// Smallest-suffix freshener: strips trailing digits from `base` and returns
/// the stem followed by the smallest natural number not in `avoid`.
inline Name fresh_name(const Name& base, const NameSet& avoid) {
  std::size_t end = base.size();
  while (end > 0 && std::isdigit(static_cast<unsigned char>(base[end - 1]))) --end;
  Name stem = end == 0 ? Name("x") : base.substr(0, end);
  for (unsigned n = 0;; ++n) {
    Name candidate = stem + std::to_string(n);
    if (!avoid.contains(candidate)) return candidate;
  }
}

inline std::vector<Name> dom(const Context& ctx) {
  std::vector<Name> out;
  out.reserve(ctx.size());
  for (const auto& b : ctx) out.push_back(b.name);
  return out;
}

inline TypeSeq rg(const Context& ctx) {
  TypeSeq out;
  out.reserve(ctx.size());
  for (const auto& b : ctx) out.push_back(b.sort);
  return out;
}

struct ContextProjection {
  std::vector<Name> dom;
  TypeSeq rg;
};

inline ContextProjection context_project(const Context& ctx) { return {dom(ctx), rg(ctx)}; }

inline const Binding* lookup(const Context& ctx, const Name& x) {
  for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
    if (it->name == x) return &*it;
  return nullptr;
}

inline bool has_distinct_domain(const Context& ctx) {
  NameSet seen;
  for (const auto& b : ctx)
    if (!seen.insert(b.name).second) return false;
  return true;
}

inline TermSeq vars_of(const std::vector<Name>& names) {
  TermSeq out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(var(n));
  return out;
}

// ---------------------------------------------------------------------------
// Free variables per level

NameSet free_vars(const Term& m, unsigned level);

inline NameSet free_vars(const TermSeq& seq, unsigned level) {
  NameSet out;
  for (const auto& t : seq) out.merge(free_vars(t, level));
  return out;
}

inline NameSet free_vars(const Term& m, unsigned level) {
  return m.visit(overloaded{
      [&](const Var& v) { return level == 1 ? NameSet{v.name} : NameSet{}; },
      [&](const Const&) { return NameSet{}; },
      [&](const Lam& l) {
        NameSet fv = free_vars(l.body, level);
        if (level == 1) fv.erase(l.var);
        return fv;
      },
      [&](const App& a) {
        NameSet fv = free_vars(a.fun, level);
        fv.merge(free_vars(a.arg, level));
        return fv;
      },
      [&](const Quo& q) { return free_vars(q.body, level + 1); },
      [&](const Unq& u) {
        NameSet fv = free_vars(u.args, level);
        if (level > u.level) fv.merge(free_vars(u.code, level - u.level));
        return fv;
      },
      [&](const CAbs& c) { return free_vars(c.body, level); },
      [&](const CApp& c) { return free_vars(c.code, level); },
  });
}

/// Every term or weakening variable name occurring anywhere in `m`, bound or
/// free, at any level. Used to build avoid-sets.
inline void collect_names(const Term& m, NameSet& out) {
  m.visit(overloaded{
      [&](const Var& v) { out.insert(v.name); },
      [&](const Const&) {},
      [&](const Lam& l) {
        out.insert(l.var);
        collect_names(l.body, out);
      },
      [&](const App& a) {
        collect_names(a.fun, out);
        collect_names(a.arg, out);
      },
      [&](const Quo& q) {
        for (const auto& b : q.ctx) out.insert(b.name);
        collect_names(q.body, out);
      },
      [&](const Unq& u) {
        collect_names(u.code, out);
        for (const auto& a : u.args) collect_names(a, out);
      },
      [&](const CAbs& c) { collect_names(c.body, out); },
      [&](const CApp& c) { collect_names(c.code, out); },
  });
}

inline NameSet all_names(const Term& m) {
  NameSet out;
  collect_names(m, out);
  return out;
}

// ---------------------------------------------------------------------------
// Free context variables (level-less)

NameSet free_context_vars(const Type& t);

inline NameSet free_context_vars(const SeqEntry& e) {
  if (const auto* c = std::get_if<CVar>(&e)) return {c->name};
  return free_context_vars(std::get<Type>(e));
}

inline NameSet free_context_vars(const TypeSeq& seq) {
  NameSet out;
  for (const auto& e : seq) out.merge(free_context_vars(e));
  return out;
}

inline NameSet free_context_vars(const Type& t) {
  return t.visit(overloaded{
      [](const BaseType&) { return NameSet{}; },
      [](const ArrowType& a) {
        NameSet out = free_context_vars(a.dom);
        out.merge(free_context_vars(a.cod));
        return out;
      },
      [](const ModalType& m) {
        NameSet out = free_context_vars(m.ctx);
        out.merge(free_context_vars(m.body));
        return out;
      },
      [](const ForallType& f) {
        NameSet out = free_context_vars(f.body);
        out.erase(f.cvar);
        return out;
      },
  });
}

inline NameSet free_context_vars(const Context& ctx) {
  NameSet out;
  for (const auto& b : ctx) out.merge(free_context_vars(b.sort));
  return out;
}

inline NameSet free_context_vars(const ContextStack& stack) {
  NameSet out;
  for (const auto& ctx : stack) out.merge(free_context_vars(ctx));
  return out;
}

NameSet free_context_vars(const Term& m);

inline NameSet free_context_vars(const TermSeq& seq) {
  NameSet out;
  for (const auto& t : seq) out.merge(free_context_vars(t));
  return out;
}

inline NameSet free_context_vars(const Term& m) {
  return m.visit(overloaded{
      [](const Var&) { return NameSet{}; },
      [](const Const&) { return NameSet{}; },
      [](const Lam& l) {
        NameSet out = free_context_vars(l.annot);
        out.merge(free_context_vars(l.body));
        return out;
      },
      [](const App& a) {
        NameSet out = free_context_vars(a.fun);
        out.merge(free_context_vars(a.arg));
        return out;
      },
      [](const Quo& q) {
        NameSet out = free_context_vars(q.ctx);
        out.merge(free_context_vars(q.body));
        return out;
      },
      [](const Unq& u) {
        NameSet out = free_context_vars(u.args);
        out.merge(free_context_vars(u.code));
        return out;
      },
      [](const CAbs& c) {
        NameSet out = free_context_vars(c.body);
        out.erase(c.cvar);
        return out;
      },
      [](const CApp& c) {
        NameSet out = free_context_vars(c.code);
        out.merge(free_context_vars(c.tys));
        return out;
      },
  });
}

/// Every context-variable and base-type name in `t`, bound or free. Context
/// variables and base types share the spelling of type-sequence entries, so
/// freshly generated context variables avoid both.
inline void collect_type_names(const Type& t, NameSet& out);

inline void collect_type_names(const SeqEntry& e, NameSet& out) {
  if (const auto* c = std::get_if<CVar>(&e))
    out.insert(c->name);
  else
    collect_type_names(std::get<Type>(e), out);
}

inline void collect_type_names(const Type& t, NameSet& out) {
  t.visit(overloaded{
      [&](const BaseType& b) { out.insert(b.name); },
      [&](const ArrowType& a) {
        collect_type_names(a.dom, out);
        collect_type_names(a.cod, out);
      },
      [&](const ModalType& m) {
        for (const auto& e : m.ctx) collect_type_names(e, out);
        collect_type_names(m.body, out);
      },
      [&](const ForallType& f) {
        out.insert(f.cvar);
        collect_type_names(f.body, out);
      },
  });
}

inline void collect_type_names(const Term& m, NameSet& out) {
  m.visit(overloaded{
      [&](const Var&) {},
      [&](const Const&) {},
      [&](const Lam& l) {
        collect_type_names(l.annot, out);
        collect_type_names(l.body, out);
      },
      [&](const App& a) {
        collect_type_names(a.fun, out);
        collect_type_names(a.arg, out);
      },
      [&](const Quo& q) {
        for (const auto& b : q.ctx) collect_type_names(b.sort, out);
        collect_type_names(q.body, out);
      },
      [&](const Unq& u) {
        collect_type_names(u.code, out);
        for (const auto& a : u.args) collect_type_names(a, out);
      },
      [&](const CAbs& c) {
        out.insert(c.cvar);
        collect_type_names(c.body, out);
      },
      [&](const CApp& c) {
        collect_type_names(c.code, out);
        for (const auto& e : c.tys) collect_type_names(e, out);
      },
  });
}

// ---------------------------------------------------------------------------
// Alpha-equivalence

namespace detail {

// Binder environments for one side of a comparison. `frames` holds the
// term/weakening binders per level (back() is the current level 1); `cvars`
// holds context-variable binders, which carry no level.
struct AlphaSide {
  std::vector<std::vector<Name>> frames;
  std::vector<Name> cvars;
};

// Distance from the innermost binder, or -1 when free.
inline long binder_index(const std::vector<Name>& binders, const Name& n) {
  for (std::size_t k = binders.size(); k > 0; --k)
    if (binders[k - 1] == n) return static_cast<long>(binders.size() - k);
  return -1;
}

inline bool same_binder(const std::vector<Name>& lb, const Name& l, const std::vector<Name>& rb,
                        const Name& r) {
  long li = binder_index(lb, l);
  long ri = binder_index(rb, r);
  if (li != ri) return false;
  return li >= 0 || l == r;
}

bool alpha_type(const Type& a, const Type& b, AlphaSide& la, AlphaSide& rb);

inline bool alpha_entry(const SeqEntry& a, const SeqEntry& b, AlphaSide& la, AlphaSide& rb) {
  if (a.index() != b.index()) return false;
  if (const auto* ca = std::get_if<CVar>(&a))
    return same_binder(la.cvars, ca->name, rb.cvars, std::get<CVar>(b).name);
  return alpha_type(std::get<Type>(a), std::get<Type>(b), la, rb);
}

inline bool alpha_seq(const TypeSeq& a, const TypeSeq& b, AlphaSide& la, AlphaSide& rb) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!alpha_entry(a[k], b[k], la, rb)) return false;
  return true;
}

inline bool alpha_type(const Type& a, const Type& b, AlphaSide& la, AlphaSide& rb) {
  if (a.node().v.index() != b.node().v.index()) return false;
  return a.visit(overloaded{
      [&](const BaseType& x) { return x.name == b.as<BaseType>()->name; },
      [&](const ArrowType& x) {
        const auto& y = *b.as<ArrowType>();
        return alpha_type(x.dom, y.dom, la, rb) && alpha_type(x.cod, y.cod, la, rb);
      },
      [&](const ModalType& x) {
        const auto& y = *b.as<ModalType>();
        return alpha_seq(x.ctx, y.ctx, la, rb) && alpha_type(x.body, y.body, la, rb);
      },
      [&](const ForallType& x) {
        const auto& y = *b.as<ForallType>();
        la.cvars.push_back(x.cvar);
        rb.cvars.push_back(y.cvar);
        bool ok = alpha_type(x.body, y.body, la, rb);
        la.cvars.pop_back();
        rb.cvars.pop_back();
        return ok;
      },
  });
}

inline std::vector<std::vector<Name>> drop_levels(const std::vector<std::vector<Name>>& frames,
                                                  unsigned k) {
  if (k >= frames.size()) return {};
  return {frames.begin(), frames.end() - k};
}

inline std::vector<Name>& top_frame(AlphaSide& side) {
  if (side.frames.empty()) side.frames.emplace_back();
  return side.frames.back();
}

bool alpha_term(const Term& a, const Term& b, AlphaSide& la, AlphaSide& rb);

inline bool alpha_terms(const TermSeq& a, const TermSeq& b, AlphaSide& la, AlphaSide& rb) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!alpha_term(a[k], b[k], la, rb)) return false;
  return true;
}

inline bool alpha_term(const Term& a, const Term& b, AlphaSide& la, AlphaSide& rb) {
  if (a.node().v.index() != b.node().v.index()) return false;
  return a.visit(overloaded{
      [&](const Var& x) {
        return same_binder(top_frame(la), x.name, top_frame(rb), b.as<Var>()->name);
      },
      [&](const Const& x) { return x.name == b.as<Const>()->name; },
      [&](const Lam& x) {
        const auto& y = *b.as<Lam>();
        if (!alpha_type(x.annot, y.annot, la, rb)) return false;
        top_frame(la).push_back(x.var);
        top_frame(rb).push_back(y.var);
        bool ok = alpha_term(x.body, y.body, la, rb);
        la.frames.back().pop_back();
        rb.frames.back().pop_back();
        return ok;
      },
      [&](const App& x) {
        const auto& y = *b.as<App>();
        return alpha_term(x.fun, y.fun, la, rb) && alpha_term(x.arg, y.arg, la, rb);
      },
      [&](const Quo& x) {
        const auto& y = *b.as<Quo>();
        if (x.ctx.size() != y.ctx.size()) return false;
        for (std::size_t k = 0; k < x.ctx.size(); ++k)
          if (!alpha_entry(x.ctx[k].sort, y.ctx[k].sort, la, rb)) return false;
        la.frames.emplace_back(dom(x.ctx));
        rb.frames.emplace_back(dom(y.ctx));
        bool ok = alpha_term(x.body, y.body, la, rb);
        la.frames.pop_back();
        rb.frames.pop_back();
        return ok;
      },
      [&](const Unq& x) {
        const auto& y = *b.as<Unq>();
        if (x.level != y.level) return false;
        AlphaSide lc{drop_levels(la.frames, x.level), la.cvars};
        AlphaSide rc{drop_levels(rb.frames, y.level), rb.cvars};
        return alpha_term(x.code, y.code, lc, rc) && alpha_terms(x.args, y.args, la, rb);
      },
      [&](const CAbs& x) {
        const auto& y = *b.as<CAbs>();
        la.cvars.push_back(x.cvar);
        rb.cvars.push_back(y.cvar);
        bool ok = alpha_term(x.body, y.body, la, rb);
        la.cvars.pop_back();
        rb.cvars.pop_back();
        return ok;
      },
      [&](const CApp& x) {
        const auto& y = *b.as<CApp>();
        return alpha_term(x.code, y.code, la, rb) && alpha_seq(x.tys, y.tys, la, rb);
      },
  });
}

}  // namespace detail

inline bool alpha_equal(const Type& a, const Type& b) {
  detail::AlphaSide la, rb;
  return detail::alpha_type(a, b, la, rb);
}

inline bool alpha_equal(const TypeSeq& a, const TypeSeq& b) {
  detail::AlphaSide la, rb;
  return detail::alpha_seq(a, b, la, rb);
}

inline bool alpha_equal(const Term& a, const Term& b) {
  detail::AlphaSide la, rb;
  return detail::alpha_term(a, b, la, rb);
}

inline bool alpha_equal(const TermSeq& a, const TermSeq& b) {
  detail::AlphaSide la, rb;
  return detail::alpha_terms(a, b, la, rb);
}

/// Contexts are compared entrywise: same names, same binding kinds and
/// alpha-equal sorts. Their names are free here (they are what a stack binds).
inline bool same_context(const Context& a, const Context& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].name != b[k].name) return false;
    detail::AlphaSide la, rb;
    if (!detail::alpha_entry(a[k].sort, b[k].sort, la, rb)) return false;
  }
  return true;
}

}  // namespace cmtt
