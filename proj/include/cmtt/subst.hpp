#pragma once

// Meta operations: term substitution [sigma]_l, level substitution, and
// context substitution [S/g] with its weaken / gen_sym machinery.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cmtt/syntax.hpp"

namespace cmtt {

/// One entry of a substitution content: `M/x` (Term) or `Ms/i` (TermSeq).
struct SubstEntry {
  Name target;
  std::variant<Term, TermSeq> replacement;
};

using SubstContent = std::vector<SubstEntry>;

inline const SubstEntry* find_entry(const SubstContent& sigma, const Name& x) {
  for (auto it = sigma.rbegin(); it != sigma.rend(); ++it)
    if (it->target == x) return &*it;
  return nullptr;
}

inline NameSet subst_free_vars(const SubstContent& sigma) {
  NameSet out;
  for (const auto& e : sigma) {
    if (const auto* t = std::get_if<Term>(&e.replacement))
      out.merge(free_vars(*t, 1));
    else
      out.merge(free_vars(std::get<TermSeq>(e.replacement), 1));
  }
  return out;
}

inline NameSet subst_free_context_vars(const SubstContent& sigma) {
  NameSet out;
  for (const auto& e : sigma) {
    if (const auto* t = std::get_if<Term>(&e.replacement))
      out.merge(free_context_vars(*t));
    else
      out.merge(free_context_vars(std::get<TermSeq>(e.replacement)));
  }
  return out;
}

/// Substitution `[N1/x1, ..., Nk/xk]` built from a context and a term
/// sequence of equal length (the `Ns/Gamma` matching of the reduction rules).
/// Returns nothing when the shapes do not match: a weakening binding must be
/// matched by a bare variable (a weakening variable).
inline std::optional<SubstContent> match_sequence(const TermSeq& args, const Context& ctx) {
  if (args.size() != ctx.size()) return std::nullopt;
  SubstContent sigma;
  for (std::size_t k = 0; k < ctx.size(); ++k) {
    if (ctx[k].is_weakening()) {
      if (!args[k].as<Var>()) return std::nullopt;
      sigma.push_back({ctx[k].name, TermSeq{args[k]}});
    } else {
      sigma.push_back({ctx[k].name, args[k]});
    }
  }
  return sigma;
}

// ---------------------------------------------------------------------------
// Context-variable renaming (no capture possible: `to` is chosen fresh)

Type rename_cvar(const Type& t, const Name& from, const Name& to);

inline SeqEntry rename_cvar(const SeqEntry& e, const Name& from, const Name& to) {
  if (const auto* c = std::get_if<CVar>(&e)) return c->name == from ? SeqEntry{CVar{to}} : e;
  return rename_cvar(std::get<Type>(e), from, to);
}

inline TypeSeq rename_cvar(const TypeSeq& seq, const Name& from, const Name& to) {
  TypeSeq out;
  for (const auto& e : seq) out.push_back(rename_cvar(e, from, to));
  return out;
}

inline Type rename_cvar(const Type& t, const Name& from, const Name& to) {
  return t.visit(overloaded{
      [&](const BaseType&) { return t; },
      [&](const ArrowType& a) { return arrow(rename_cvar(a.dom, from, to), rename_cvar(a.cod, from, to)); },
      [&](const ModalType& m) { return modal(rename_cvar(m.ctx, from, to), rename_cvar(m.body, from, to)); },
      [&](const ForallType& f) {
        return f.cvar == from ? t : forall(f.cvar, rename_cvar(f.body, from, to));
      },
  });
}

inline Term rename_cvar(const Term& m, const Name& from, const Name& to) {
  return m.visit(overloaded{
      [&](const Var&) { return m; },
      [&](const Const&) { return m; },
      [&](const Lam& l) { return lam(l.var, rename_cvar(l.annot, from, to), rename_cvar(l.body, from, to)); },
      [&](const App& a) { return app(rename_cvar(a.fun, from, to), rename_cvar(a.arg, from, to)); },
      [&](const Quo& q) {
        Context ctx;
        for (const auto& b : q.ctx) ctx.push_back({b.name, rename_cvar(b.sort, from, to)});
        return quo(std::move(ctx), rename_cvar(q.body, from, to));
      },
      [&](const Unq& u) {
        TermSeq args;
        for (const auto& a : u.args) args.push_back(rename_cvar(a, from, to));
        return unq(u.level, rename_cvar(u.code, from, to), std::move(args));
      },
      [&](const CAbs& c) { return c.cvar == from ? m : cabs(c.cvar, rename_cvar(c.body, from, to)); },
      [&](const CApp& c) { return capp(rename_cvar(c.code, from, to), rename_cvar(c.tys, from, to)); },
  });
}

// ---------------------------------------------------------------------------
// Term substitution

Term apply_subst(const Term& m, const SubstContent& sigma, unsigned level);

inline TermSeq apply_subst(const TermSeq& seq, const SubstContent& sigma, unsigned level) {
  TermSeq out;
  for (const auto& t : seq) {
    if (level == 1) {
      if (const auto* v = t.as<Var>()) {
        if (const auto* e = find_entry(sigma, v->name)) {
          if (const auto* block = std::get_if<TermSeq>(&e->replacement)) {
            out.insert(out.end(), block->begin(), block->end());
            continue;
          }
        }
      }
    }
    out.push_back(apply_subst(t, sigma, level));
  }
  return out;
}

inline Term rename_var(const Term& m, const Name& from, const Name& to, unsigned level = 1) {
  return apply_subst(m, SubstContent{{from, var(to)}}, level);
}

inline Term apply_subst(const Term& m, const SubstContent& sigma, unsigned level) {
  if (sigma.empty()) return m;
  return m.visit(overloaded{
      [&](const Var& v) -> Term {
        if (level == 1)
          if (const auto* e = find_entry(sigma, v.name))
            if (const auto* t = std::get_if<Term>(&e->replacement)) return *t;
        return m;
      },
      [&](const Const&) { return m; },
      [&](const Lam& l) -> Term {
        if (level > 1) return lam(l.var, l.annot, apply_subst(l.body, sigma, level));
        SubstContent inner;
        for (const auto& e : sigma)
          if (e.target != l.var) inner.push_back(e);
        if (inner.empty()) return m;
        NameSet fv = subst_free_vars(inner);
        if (!fv.contains(l.var)) return lam(l.var, l.annot, apply_subst(l.body, inner, 1));
        NameSet avoid = fv;
        avoid.merge(free_vars(l.body, 1));
        for (const auto& e : inner) avoid.insert(e.target);
        collect_names(l.body, avoid);
        Name fresh = fresh_name(l.var, avoid);
        return lam(fresh, l.annot, apply_subst(rename_var(l.body, l.var, fresh), inner, 1));
      },
      [&](const App& a) { return app(apply_subst(a.fun, sigma, level), apply_subst(a.arg, sigma, level)); },
      [&](const Quo& q) { return quo(q.ctx, apply_subst(q.body, sigma, level + 1)); },
      [&](const Unq& u) {
        Term code = level > u.level ? apply_subst(u.code, sigma, level - u.level) : u.code;
        return unq(u.level, std::move(code), apply_subst(u.args, sigma, level));
      },
      [&](const CAbs& c) -> Term {
        NameSet fcv = subst_free_context_vars(sigma);
        if (!fcv.contains(c.cvar)) return cabs(c.cvar, apply_subst(c.body, sigma, level));
        NameSet avoid = fcv;
        collect_type_names(c.body, avoid);
        Name fresh = fresh_name(c.cvar, avoid);
        return cabs(fresh, apply_subst(rename_cvar(c.body, c.cvar, fresh), sigma, level));
      },
      [&](const CApp& c) { return capp(apply_subst(c.code, sigma, level), c.tys); },
  });
}

// ---------------------------------------------------------------------------
// Level substitution

Term apply_level_subst(const Term& m, unsigned n, unsigned level);

inline TermSeq apply_level_subst(const TermSeq& seq, unsigned n, unsigned level) {
  TermSeq out;
  for (const auto& t : seq) out.push_back(apply_level_subst(t, n, level));
  return out;
}

inline Term apply_level_subst(const Term& m, unsigned n, unsigned level) {
  return m.visit(overloaded{
      [&](const Var&) { return m; },
      [&](const Const&) { return m; },
      [&](const Lam& l) { return lam(l.var, l.annot, apply_level_subst(l.body, n, level)); },
      [&](const App& a) { return app(apply_level_subst(a.fun, n, level), apply_level_subst(a.arg, n, level)); },
      [&](const Quo& q) { return quo(q.ctx, apply_level_subst(q.body, n, level + 1)); },
      [&](const Unq& u) {
        if (level <= u.level) return unq(u.level + n - 1, u.code, apply_level_subst(u.args, n, level));
        return unq(u.level, apply_level_subst(u.code, n, level - u.level), apply_level_subst(u.args, n, level));
      },
      [&](const CAbs& c) { return cabs(c.cvar, apply_level_subst(c.body, n, level)); },
      [&](const CApp& c) { return capp(apply_level_subst(c.code, n, level), c.tys); },
  });
}

// ---------------------------------------------------------------------------
// Binder refreshing

/// Renames every lambda and quotation binder of `m` (at every level) to a
/// name outside `avoid`, growing `avoid` with each name it picks.
inline Term refresh_binders(const Term& m, NameSet& avoid) {
  return m.visit(overloaded{
      [&](const Var&) { return m; },
      [&](const Const&) { return m; },
      [&](const Lam& l) {
        Name fresh = fresh_name(l.var, avoid);
        avoid.insert(fresh);
        Term body = rename_var(l.body, l.var, fresh);
        return lam(fresh, l.annot, refresh_binders(body, avoid));
      },
      [&](const App& a) {
        Term f = refresh_binders(a.fun, avoid);
        return app(std::move(f), refresh_binders(a.arg, avoid));
      },
      [&](const Quo& q) {
        Context ctx;
        SubstContent sigma;
        for (const auto& b : q.ctx) {
          Name fresh = fresh_name(b.name, avoid);
          avoid.insert(fresh);
          ctx.push_back({fresh, b.sort});
          sigma.push_back({b.name, var(fresh)});
        }
        Term body = apply_subst(q.body, sigma, 1);
        return quo(std::move(ctx), refresh_binders(body, avoid));
      },
      [&](const Unq& u) {
        Term code = refresh_binders(u.code, avoid);
        TermSeq args;
        for (const auto& a : u.args) args.push_back(refresh_binders(a, avoid));
        return unq(u.level, std::move(code), std::move(args));
      },
      [&](const CAbs& c) { return cabs(c.cvar, refresh_binders(c.body, avoid)); },
      [&](const CApp& c) { return capp(refresh_binders(c.code, avoid), c.tys); },
  });
}

// ---------------------------------------------------------------------------
// Context substitution

Type ctx_subst(const Type& t, const TypeSeq& s, const Name& g);

inline TypeSeq ctx_subst(const TypeSeq& seq, const TypeSeq& s, const Name& g) {
  TypeSeq out;
  for (const auto& e : seq) {
    if (const auto* c = std::get_if<CVar>(&e)) {
      if (c->name == g)
        out.insert(out.end(), s.begin(), s.end());
      else
        out.push_back(e);
    } else {
      out.push_back(ctx_subst(std::get<Type>(e), s, g));
    }
  }
  return out;
}

inline SeqEntry ctx_subst(const SeqEntry& e, const TypeSeq& s, const Name& g) {
  if (std::holds_alternative<CVar>(e)) {
    TypeSeq r = ctx_subst(TypeSeq{e}, s, g);
    // A binding sort is a single entry; only the weaken machinery replaces
    // `i : g` bindings, so here g is never the substituted variable.
    return r.size() == 1 ? r.front() : e;
  }
  return ctx_subst(std::get<Type>(e), s, g);
}

namespace detail {

// Name for a binder `bound` that would capture a free context variable of the
// substituted sequence.
inline Name cvar_escape_name(const Name& bound, const TypeSeq& s, const Name& g, const NameSet& extra) {
  NameSet avoid = free_context_vars(s);
  for (const auto& e : s) collect_type_names(e, avoid);
  avoid.insert(g);
  avoid.insert(extra.begin(), extra.end());
  return fresh_name(bound, avoid);
}

}  // namespace detail

inline Type ctx_subst(const Type& t, const TypeSeq& s, const Name& g) {
  return t.visit(overloaded{
      [&](const BaseType&) { return t; },
      [&](const ArrowType& a) { return arrow(ctx_subst(a.dom, s, g), ctx_subst(a.cod, s, g)); },
      [&](const ModalType& m) { return modal(ctx_subst(m.ctx, s, g), ctx_subst(m.body, s, g)); },
      [&](const ForallType& f) -> Type {
        if (f.cvar == g || !free_context_vars(f.body).contains(g)) return t;
        if (!free_context_vars(s).contains(f.cvar)) return forall(f.cvar, ctx_subst(f.body, s, g));
        NameSet names;
        collect_type_names(f.body, names);
        Name fresh = detail::cvar_escape_name(f.cvar, s, g, names);
        return forall(fresh, ctx_subst(rename_cvar(f.body, f.cvar, fresh), s, g));
      },
  });
}

inline Context ctx_subst(const Context& ctx, const TypeSeq& s, const Name& g) {
  Context out;
  for (const auto& b : ctx) out.push_back({b.name, ctx_subst(b.sort, s, g)});
  return out;
}

/// One fresh binder per entry of `s`: term variables (base "x") for types,
/// weakening variables (base "i") for context variables. All names avoid
/// `avoid` and each other.
inline Context gen_sym(const NameSet& avoid, const TypeSeq& s) {
  NameSet used = avoid;
  Context out;
  for (const auto& e : s) {
    Name n = fresh_name(std::holds_alternative<CVar>(e) ? "i" : "x", used);
    used.insert(n);
    out.push_back({n, e});
  }
  return out;
}

struct WeakenResult {
  Context ctx;
  SubstContent subst;
};

/// Replaces every `i : g` of `ctx` by a fresh block for `s` (in place, so the
/// order of `ctx` is kept) and rewrites the other sorts with `[s/g]`. The
/// returned substitution maps each replaced `i` to its block's domain.
inline WeakenResult weaken(const Name& g, const TypeSeq& s, const Context& ctx, const NameSet& avoid = {}) {
  NameSet used = avoid;
  for (const auto& b : ctx) used.insert(b.name);
  WeakenResult out;
  for (const auto& b : ctx) {
    const auto* c = std::get_if<CVar>(&b.sort);
    if (c && c->name == g) {
      Context block = gen_sym(used, s);
      for (const auto& nb : block) used.insert(nb.name);
      out.subst.push_back({b.name, vars_of(dom(block))});
      out.ctx.insert(out.ctx.end(), block.begin(), block.end());
    } else {
      out.ctx.push_back({b.name, ctx_subst(b.sort, s, g)});
    }
  }
  return out;
}

Term ctx_subst(const Term& m, const TypeSeq& s, const Name& g);

inline TermSeq ctx_subst(const TermSeq& seq, const TypeSeq& s, const Name& g) {
  TermSeq out;
  for (const auto& t : seq) out.push_back(ctx_subst(t, s, g));
  return out;
}

inline Term ctx_subst(const Term& m, const TypeSeq& s, const Name& g) {
  return m.visit(overloaded{
      [&](const Var&) { return m; },
      [&](const Const&) { return m; },
      [&](const Lam& l) { return lam(l.var, ctx_subst(l.annot, s, g), ctx_subst(l.body, s, g)); },
      [&](const App& a) { return app(ctx_subst(a.fun, s, g), ctx_subst(a.arg, s, g)); },
      [&](const Quo& q) {
        NameSet avoid = all_names(q.body);
        WeakenResult w = weaken(g, s, q.ctx, avoid);
        return quo(std::move(w.ctx), apply_subst(ctx_subst(q.body, s, g), w.subst, 1));
      },
      [&](const Unq& u) { return unq(u.level, ctx_subst(u.code, s, g), ctx_subst(u.args, s, g)); },
      [&](const CAbs& c) -> Term {
        if (c.cvar == g || !free_context_vars(c.body).contains(g)) return m;
        if (!free_context_vars(s).contains(c.cvar)) return cabs(c.cvar, ctx_subst(c.body, s, g));
        NameSet names;
        collect_type_names(c.body, names);
        Name fresh = detail::cvar_escape_name(c.cvar, s, g, names);
        return cabs(fresh, ctx_subst(rename_cvar(c.body, c.cvar, fresh), s, g));
      },
      [&](const CApp& c) { return capp(ctx_subst(c.code, s, g), ctx_subst(c.tys, s, g)); },
  });
}

/// `(Gamma_L; ...; Gamma_1 |- M : T)[s/g]`: every stack context is weakened and
/// its substitution applied to `M` at that context's level.
inline Judgment judgment_ctx_subst(const Judgment& j, const TypeSeq& s, const Name& g) {
  NameSet avoid = all_names(j.term);
  for (const auto& ctx : j.stack)
    for (const auto& b : ctx) avoid.insert(b.name);
  Judgment out{{}, ctx_subst(j.term, s, g), ctx_subst(j.type, s, g)};
  const std::size_t depth = j.stack.size();
  for (std::size_t k = 0; k < depth; ++k) {
    WeakenResult w = weaken(g, s, j.stack[k], avoid);
    for (const auto& b : w.ctx) avoid.insert(b.name);
    out.stack.push_back(std::move(w.ctx));
    unsigned level = static_cast<unsigned>(depth - k);
    out.term = apply_subst(out.term, w.subst, level);
  }
  return out;
}

}  // namespace cmtt
