#pragma once

// Beta reduction (redex enumeration, leftmost-outermost normalisation) and
// one-shot, type-directed eta expansion.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cmtt/error.hpp"
#include "cmtt/print.hpp"
#include "cmtt/subst.hpp"
#include "cmtt/syntax.hpp"
#include "cmtt/typecheck.hpp"

namespace cmtt {

enum class RedexKind { BetaApp, BetaUnq, BetaCApp };

inline std::string_view to_string(RedexKind k) {
  switch (k) {
    case RedexKind::BetaApp: return "BetaApp";
    case RedexKind::BetaUnq: return "BetaUnq";
    case RedexKind::BetaCApp: return "BetaCApp";
  }
  return "?";
}

/// `path` lists child indices from the root: Lam/Quo/CAbs/CApp body 0,
/// App function 0 and argument 1, Unq code 0 and argument k at 1 + k.
struct Redex {
  std::vector<unsigned> path;
  RedexKind kind;
  Term reduct;
};

inline constexpr std::size_t default_fuel = 100000;

/// The contractum when `m` itself is a redex. `avoid` holds every name of the
/// enclosing term; it feeds the renaming that precedes a depth-0 unquotation
/// redex, which merges the quotation's context into the current one.
inline std::optional<std::pair<RedexKind, Term>> contract(const Term& m, const NameSet& avoid) {
  if (const auto* a = m.as<App>()) {
    if (const auto* l = a->fun.as<Lam>())
      return std::pair{RedexKind::BetaApp, apply_subst(l->body, SubstContent{{l->var, a->arg}}, 1)};
    return std::nullopt;
  }
  if (const auto* u = m.as<Unq>()) {
    const auto* q = u->code.as<Quo>();
    if (!q || !match_sequence(u->args, q->ctx)) return std::nullopt;
    Term code = u->code;
    if (u->level == 0) {
      NameSet used = avoid;
      collect_names(m, used);
      code = refresh_binders(code, used);
    }
    const auto& fresh = *code.as<Quo>();
    SubstContent sigma = *match_sequence(u->args, fresh.ctx);
    return std::pair{RedexKind::BetaUnq, apply_subst(apply_level_subst(fresh.body, u->level, 1), sigma, 1)};
  }
  if (const auto* c = m.as<CApp>()) {
    if (const auto* abs = c->code.as<CAbs>())
      return std::pair{RedexKind::BetaCApp, ctx_subst(abs->body, c->tys, abs->cvar)};
  }
  return std::nullopt;
}

namespace detail {

inline void collect_redexes(const Term& m, const NameSet& avoid, std::vector<unsigned>& path,
                            std::vector<Redex>& out) {
  if (auto r = contract(m, avoid)) out.push_back({path, r->first, r->second});
  auto child = [&](unsigned idx, const Term& t) {
    path.push_back(idx);
    collect_redexes(t, avoid, path, out);
    path.pop_back();
  };
  m.visit(overloaded{
      [&](const Var&) {},
      [&](const Const&) {},
      [&](const Lam& l) { child(0, l.body); },
      [&](const App& a) {
        child(0, a.fun);
        child(1, a.arg);
      },
      [&](const Quo& q) { child(0, q.body); },
      [&](const Unq& u) {
        child(0, u.code);
        for (std::size_t k = 0; k < u.args.size(); ++k) child(1 + static_cast<unsigned>(k), u.args[k]);
      },
      [&](const CAbs& c) { child(0, c.body); },
      [&](const CApp& c) { child(0, c.code); },
  });
}

inline std::optional<Term> step_lo(const Term& m, const NameSet& avoid) {
  if (auto r = contract(m, avoid)) return r->second;
  return m.visit(overloaded{
      [&](const Var&) -> std::optional<Term> { return std::nullopt; },
      [&](const Const&) -> std::optional<Term> { return std::nullopt; },
      [&](const Lam& l) -> std::optional<Term> {
        if (auto b = step_lo(l.body, avoid)) return lam(l.var, l.annot, *b);
        return std::nullopt;
      },
      [&](const App& a) -> std::optional<Term> {
        if (auto f = step_lo(a.fun, avoid)) return app(*f, a.arg);
        if (auto x = step_lo(a.arg, avoid)) return app(a.fun, *x);
        return std::nullopt;
      },
      [&](const Quo& q) -> std::optional<Term> {
        if (auto b = step_lo(q.body, avoid)) return quo(q.ctx, *b);
        return std::nullopt;
      },
      [&](const Unq& u) -> std::optional<Term> {
        if (auto c = step_lo(u.code, avoid)) return unq(u.level, *c, u.args);
        for (std::size_t k = 0; k < u.args.size(); ++k) {
          if (auto x = step_lo(u.args[k], avoid)) {
            TermSeq args = u.args;
            args[k] = *x;
            return unq(u.level, u.code, std::move(args));
          }
        }
        return std::nullopt;
      },
      [&](const CAbs& c) -> std::optional<Term> {
        if (auto b = step_lo(c.body, avoid)) return cabs(c.cvar, *b);
        return std::nullopt;
      },
      [&](const CApp& c) -> std::optional<Term> {
        if (auto b = step_lo(c.code, avoid)) return capp(*b, c.tys);
        return std::nullopt;
      },
  });
}

}  // namespace detail

/// Every redex of `m` in pre-order (outermost first, left to right).
inline std::vector<Redex> beta_redexes(const Term& m) {
  NameSet avoid = all_names(m);
  std::vector<Redex> out;
  std::vector<unsigned> path;
  detail::collect_redexes(m, avoid, path, out);
  return out;
}

/// `m` with the subterm at `path` replaced by `replacement`.
inline Term replace_at(const Term& m, const std::vector<unsigned>& path, const Term& replacement,
                       std::size_t depth = 0) {
  if (depth == path.size()) return replacement;
  const unsigned idx = path[depth];
  auto sub = [&](const Term& t) { return replace_at(t, path, replacement, depth + 1); };
  return m.visit(overloaded{
      [&](const Var&) { return m; },
      [&](const Const&) { return m; },
      [&](const Lam& l) { return lam(l.var, l.annot, sub(l.body)); },
      [&](const App& a) { return idx == 0 ? app(sub(a.fun), a.arg) : app(a.fun, sub(a.arg)); },
      [&](const Quo& q) { return quo(q.ctx, sub(q.body)); },
      [&](const Unq& u) {
        if (idx == 0) return unq(u.level, sub(u.code), u.args);
        TermSeq args = u.args;
        args[idx - 1] = sub(args[idx - 1]);
        return unq(u.level, u.code, std::move(args));
      },
      [&](const CAbs& c) { return cabs(c.cvar, sub(c.body)); },
      [&](const CApp& c) { return capp(sub(c.code), c.tys); },
  });
}

/// One leftmost-outermost step, or nothing when `m` is normal.
inline std::optional<Term> step(const Term& m) { return detail::step_lo(m, all_names(m)); }

inline Term normalize(const Term& m, std::size_t fuel = default_fuel) {
  Term cur = m;
  for (std::size_t used = 0;; ++used) {
    auto next = step(cur);
    if (!next) return cur;
    if (used == fuel) throw Error(ErrorKind::FuelExhausted, "no normal form within " + std::to_string(fuel) + " steps");
    cur = *next;
  }
}

// ---------------------------------------------------------------------------
// Canonical representatives of alpha-classes

namespace detail {

inline Type canonical_type(const Type& t, unsigned& counter) {
  return t.visit(overloaded{
      [&](const BaseType&) { return t; },
      [&](const ArrowType& a) {
        Type d = canonical_type(a.dom, counter);
        return arrow(d, canonical_type(a.cod, counter));
      },
      [&](const ModalType& m) {
        TypeSeq ctx;
        for (const auto& e : m.ctx)
          ctx.push_back(std::holds_alternative<Type>(e) ? SeqEntry{canonical_type(std::get<Type>(e), counter)} : e);
        return modal(std::move(ctx), canonical_type(m.body, counter));
      },
      [&](const ForallType& f) {
        Name n = "%" + std::to_string(counter++);
        return forall(n, canonical_type(rename_cvar(f.body, f.cvar, n), counter));
      },
  });
}

inline SeqEntry canonical_entry(const SeqEntry& e, unsigned& counter) {
  if (const auto* t = std::get_if<Type>(&e)) return canonical_type(*t, counter);
  return e;
}

inline Term canonical_term(const Term& m, unsigned& counter) {
  return m.visit(overloaded{
      [&](const Var&) { return m; },
      [&](const Const&) { return m; },
      [&](const Lam& l) {
        Type annot = canonical_type(l.annot, counter);
        Name n = "%" + std::to_string(counter++);
        return lam(n, annot, canonical_term(rename_var(l.body, l.var, n), counter));
      },
      [&](const App& a) {
        Term f = canonical_term(a.fun, counter);
        return app(f, canonical_term(a.arg, counter));
      },
      [&](const Quo& q) {
        Context ctx;
        SubstContent sigma;
        for (const auto& b : q.ctx) {
          Name n = "%" + std::to_string(counter++);
          ctx.push_back({n, canonical_entry(b.sort, counter)});
          sigma.push_back({b.name, var(n)});
        }
        return quo(std::move(ctx), canonical_term(apply_subst(q.body, sigma, 1), counter));
      },
      [&](const Unq& u) {
        Term code = canonical_term(u.code, counter);
        TermSeq args;
        for (const auto& a : u.args) args.push_back(canonical_term(a, counter));
        return unq(u.level, code, std::move(args));
      },
      [&](const CAbs& c) {
        Name n = "%" + std::to_string(counter++);
        return cabs(n, canonical_term(rename_cvar(c.body, c.cvar, n), counter));
      },
      [&](const CApp& c) {
        Term code = canonical_term(c.code, counter);
        TypeSeq tys;
        for (const auto& e : c.tys) tys.push_back(canonical_entry(e, counter));
        return capp(code, std::move(tys));
      },
  });
}

}  // namespace detail

/// A string identifying the alpha-class of `m`: two terms get the same key
/// iff they are alpha-equal.
inline std::string canonical_key(const Term& m) {
  unsigned counter = 0;
  return format(detail::canonical_term(m, counter));
}

// ---------------------------------------------------------------------------
// Eta expansion

inline Term eta_expand(const Term& m, const ContextStack& stack, Variant v) {
  Type t = synth(v, stack, m);
  NameSet avoid = all_names(m);
  if (!stack.empty())
    for (const auto& b : stack.back()) avoid.insert(b.name);
  if (const auto* a = t.as<ArrowType>()) {
    Name x = avoid.contains("x") ? fresh_name("x", avoid) : Name("x");
    return lam(x, a->dom, app(m, var(x)));
  }
  if (const auto* mt = t.as<ModalType>()) {
    Context ctx = gen_sym(avoid, mt->ctx);
    return quo(ctx, unq(1, m, vars_of(dom(ctx))));
  }
  if (const auto* f = t.as<ForallType>()) {
    NameSet taken = free_context_vars(m);
    taken.merge(free_context_vars(stack));
    Name g = f->cvar;
    if (taken.contains(g)) {
      collect_type_names(m, taken);
      g = fresh_name(g, taken);
    }
    return cabs(g, capp(m, TypeSeq{CVar{g}}));
  }
  throw Error(ErrorKind::NotExpandable, "no eta rule for base type " + format(t), "Eta", {}, format(stack));
}

}  // namespace cmtt
