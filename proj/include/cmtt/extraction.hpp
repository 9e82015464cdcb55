#pragma once

// Context extraction: the translation from the linear-temporal calculus into
// the K variant of the polymorphic-context box calculus. Allocators make the
// per-stage contexts of next-stage types explicit; the structural builders
// (weakening, contraction, exchange) move terms between allocators.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cmtt/circ.hpp"
#include "cmtt/error.hpp"
#include "cmtt/syntax.hpp"

namespace cmtt::extract {

// ---------------------------------------------------------------------------
// Allocators

namespace detail {

// Finitely supported map from stage index to a sequence; stages past the
// stored prefix are empty. Trailing empty stages are trimmed so equal maps
// have equal representations.
template <class Seq, class Derived>
class StageMap {
 public:
  StageMap() = default;
  explicit StageMap(std::vector<Seq> stages) : stages_(std::move(stages)) { trim(); }

  const Seq& at(std::size_t k) const {
    static const Seq empty{};
    return k < stages_.size() ? stages_[k] : empty;
  }
  /// One past the last nonempty stage.
  std::size_t support() const { return stages_.size(); }
  const std::vector<Seq>& stages() const { return stages_; }

  Derived shifted() const {
    if (stages_.empty()) return Derived{};
    return Derived(std::vector<Seq>(stages_.begin() + 1, stages_.end()));
  }
  Derived pushed(Seq head) const {
    std::vector<Seq> s;
    s.push_back(std::move(head));
    s.insert(s.end(), stages_.begin(), stages_.end());
    return Derived(std::move(s));
  }
  Derived concat(const Derived& other) const {
    std::vector<Seq> s(std::max(support(), other.support()));
    for (std::size_t k = 0; k < s.size(); ++k) {
      s[k] = at(k);
      const Seq& o = other.at(k);
      s[k].insert(s[k].end(), o.begin(), o.end());
    }
    return Derived(std::move(s));
  }
  /// Stages below `n`, the rest emptied.
  Derived below(std::size_t n) const {
    std::vector<Seq> s(stages_.begin(), stages_.begin() + std::min(n, stages_.size()));
    return Derived(std::move(s));
  }
  /// Stages from `n` on, the ones below emptied.
  Derived from(std::size_t n) const {
    std::vector<Seq> s = stages_;
    for (std::size_t k = 0; k < std::min(n, s.size()); ++k) s[k].clear();
    return Derived(std::move(s));
  }

 private:
  void trim() {
    while (!stages_.empty() && stages_.back().empty()) stages_.pop_back();
  }
  std::vector<Seq> stages_;
};

}  // namespace detail

class TypeSeqAllocator : public detail::StageMap<TypeSeq, TypeSeqAllocator> {
  using StageMap::StageMap;
};

class ContextAllocator : public detail::StageMap<Context, ContextAllocator> {
 public:
  using StageMap::StageMap;

  TypeSeqAllocator range() const {
    std::vector<TypeSeq> s;
    for (const auto& ctx : stages()) s.push_back(rg(ctx));
    return TypeSeqAllocator(std::move(s));
  }
};

inline ContextAllocator operator+(const ContextAllocator& a, const ContextAllocator& b) { return a.concat(b); }
inline TypeSeqAllocator operator+(const TypeSeqAllocator& a, const TypeSeqAllocator& b) { return a.concat(b); }

inline bool same_allocator(const ContextAllocator& a, const ContextAllocator& b) {
  if (a.support() != b.support()) return false;
  for (std::size_t k = 0; k < a.support(); ++k)
    if (!same_context(a.at(k), b.at(k))) return false;
  return true;
}

inline bool same_allocator(const TypeSeqAllocator& a, const TypeSeqAllocator& b) {
  if (a.support() != b.support()) return false;
  for (std::size_t k = 0; k < a.support(); ++k)
    if (!alpha_equal(a.at(k), b.at(k))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Fresh names for one translation run

class GenState {
 public:
  GenState() = default;
  explicit GenState(NameSet taken) : used_(std::move(taken)) {}

  void reserve(const Name& n) { used_.insert(n); }
  Name context_var() { return take("g"); }
  Name weakening_var() { return take("i"); }
  Name binder(const Name& base = "x") { return take(base); }

 private:
  Name take(const Name& base) {
    Name n = fresh_name(base, used_);
    used_.insert(n);
    return n;
  }
  NameSet used_;
};

// ---------------------------------------------------------------------------
// Depth and GenCa

inline unsigned ctx_depth(const circ::Type& t) {
  return t.visit(overloaded{
      [](const circ::BaseType&) { return 0u; },
      [](const circ::ArrowType& a) { return ctx_depth(a.cod); },
      [](const circ::NextType& n) { return ctx_depth(n.body) + 1; },
  });
}

struct GenCa {
  ContextAllocator alloc;
  std::vector<Name> cvars;
};

/// Stage k (0 <= k < n) holds one fresh weakening binding `i_k : g_k`.
inline GenCa gen_ca(GenState& st, unsigned n) {
  std::vector<Context> stages;
  std::vector<Name> cvars;
  for (unsigned k = 0; k < n; ++k) {
    Name g = st.context_var();
    Name i = st.weakening_var();
    stages.push_back({weak_binding(i, g)});
    cvars.push_back(g);
  }
  return {ContextAllocator(std::move(stages)), std::move(cvars)};
}

// ---------------------------------------------------------------------------
// Types

inline Type forall_all(const std::vector<Name>& cvars, Type body) {
  for (auto it = cvars.rbegin(); it != cvars.rend(); ++it) body = forall(*it, body);
  return body;
}

inline Type extract_type(const TypeSeqAllocator& p, const circ::Type& t, GenState& st) {
  return t.visit(overloaded{
      [&](const circ::BaseType& b) { return base(b.name); },
      [&](const circ::NextType& n) { return modal(p.at(0), extract_type(p.shifted(), n.body, st)); },
      [&](const circ::ArrowType& a) {
        GenCa q = gen_ca(st, ctx_depth(a.dom));
        TypeSeqAllocator rq = q.alloc.range();
        Type dom = extract_type(rq, a.dom, st);
        Type cod = extract_type(p + rq, a.cod, st);
        return forall_all(q.cvars, arrow(dom, cod));
      },
  });
}

inline Type extract_type(const ContextAllocator& p, const circ::Type& t, GenState& st) {
  return extract_type(p.range(), t, st);
}

// ---------------------------------------------------------------------------
// Generative translations of contexts and stacks

/// `x : T <= [[x : source]](alloc, cvars)`.
struct BindingGT {
  Name var;
  circ::Type source;
  ContextAllocator alloc;
  std::vector<Name> cvars;
  Type translated;
};

inline BindingGT translate_binding(const Name& x, const circ::Type& t, GenState& st) {
  GenCa g = gen_ca(st, ctx_depth(t));
  Type tr = extract_type(g.alloc, t, st);
  return {x, t, std::move(g.alloc), std::move(g.cvars), std::move(tr)};
}

struct ContextGT {
  std::vector<BindingGT> bindings;

  Context context() const {
    Context out;
    for (const auto& b : bindings) out.push_back(term_binding(b.var, b.translated));
    return out;
  }
  ContextAllocator alloc() const {
    ContextAllocator out;
    for (const auto& b : bindings) out = out + b.alloc;
    return out;
  }
  const BindingGT* find(const Name& x) const {
    for (auto it = bindings.rbegin(); it != bindings.rend(); ++it)
      if (it->var == x) return &*it;
    return nullptr;
  }
  ContextGT extended(BindingGT b) const {
    ContextGT out = *this;
    out.bindings.push_back(std::move(b));
    return out;
  }
};

inline ContextGT extract_context(const circ::Context& ctx, GenState& st) {
  ContextGT out;
  for (const auto& b : ctx) {
    if (out.find(b.name)) throw Error(ErrorKind::DuplicateBinder, "context binds " + b.name + " twice", "Ctx");
    out.bindings.push_back(translate_binding(b.name, b.type, st));
  }
  return out;
}

/// Translation of a past stack; layers are deepest first.
struct PastGT {
  std::vector<ContextGT> layers;

  ContextStack stack() const {
    ContextStack out;
    ContextAllocator p;
    for (const auto& layer : layers) {
      Context ctx = p.at(0);
      Context own = layer.context();
      ctx.insert(ctx.end(), own.begin(), own.end());
      out.push_back(std::move(ctx));
      p = p.shifted() + layer.alloc();
    }
    return out;
  }
  ContextAllocator alloc() const {
    ContextAllocator p;
    for (const auto& layer : layers) p = p.shifted() + layer.alloc();
    return p;
  }
};

/// Translation of a future stack; layers are nearest first.
struct FutureGT {
  std::vector<ContextGT> layers;

  ContextAllocator alloc() const {
    ContextAllocator q;
    for (auto it = layers.rbegin(); it != layers.rend(); ++it) q = (it->alloc() + q).pushed(it->context());
    return q;
  }
};

inline PastGT extract_past(const circ::PastStack& past, GenState& st) {
  PastGT out;
  for (const auto& ctx : past) out.layers.push_back(extract_context(ctx, st));
  return out;
}

inline FutureGT extract_future(const circ::FutureStack& future, GenState& st) {
  FutureGT out;
  for (const auto& ctx : future) out.layers.push_back(extract_context(ctx, st));
  return out;
}

// ---------------------------------------------------------------------------
// Structural builders

namespace detail {

inline Term capp_all(Term m, const std::vector<Name>& cvars) {
  for (const auto& g : cvars) m = capp(std::move(m), TypeSeq{CVar{g}});
  return m;
}

inline Term cabs_all(const std::vector<Name>& cvars, Term body) {
  for (auto it = cvars.rbegin(); it != cvars.rend(); ++it) body = cabs(*it, std::move(body));
  return body;
}

inline Term identity(const circ::BaseType& b, GenState& st) {
  Name x = st.binder("x");
  return lam(x, base(b.name), var(x));
}

inline bool is_sublist(const Context& small, const Context& big) {
  std::size_t k = 0;
  for (const auto& b : big)
    if (k < small.size() && small[k].name == b.name && same_context({small[k]}, {b})) ++k;
  return k == small.size();
}

inline Context join(std::initializer_list<const Context*> parts) {
  Context out;
  for (const Context* c : parts) out.insert(out.end(), c->begin(), c->end());
  return out;
}

// Arrow clause shared by the three builders: given the input type's
// allocator for the codomain and a callback producing the inner builder for
// the fresh domain allocator R.
template <class Inner>
Term arrow_clause(const circ::ArrowType& a, const ContextAllocator& in_cod, GenState& st, Inner inner) {
  GenCa r = gen_ca(st, ctx_depth(a.dom));
  Name x = st.binder("x");
  Name y = st.binder("y");
  Type x_type = forall_all(r.cvars, arrow(extract_type(r.alloc, a.dom, st), extract_type(in_cod + r.alloc, a.cod, st)));
  Term body = app(inner(r.alloc), app(capp_all(var(x), r.cvars), var(y)));
  return lam(x, x_type, cabs_all(r.cvars, lam(y, extract_type(r.alloc, a.dom, st), body)));
}

// Next clause shared by the three builders.
inline Term next_clause(const circ::NextType& n, const Context& in_ctx, const ContextAllocator& in_rest,
                        const Context& out_ctx, const Term& inner, GenState& st) {
  Name x = st.binder("x");
  Type x_type = modal(rg(in_ctx), extract_type(in_rest, n.body, st));
  return lam(x, x_type, quo(out_ctx, app(inner, unq(1, var(x), vars_of(dom(in_ctx))))));
}

inline Term build_weak_rec(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q, GenState& st) {
  return t.visit(overloaded{
      [&](const circ::BaseType& b) { return identity(b, st); },
      [&](const circ::ArrowType& a) {
        return arrow_clause(a, p, st, [&](const ContextAllocator& r) { return build_weak_rec(a.cod, p + r, q + r, st); });
      },
      [&](const circ::NextType& n) {
        Term inner = build_weak_rec(n.body, p.shifted(), q.shifted(), st);
        return next_clause(n, p.at(0), p.shifted(), q.at(0), inner, st);
      },
  });
}

inline Term build_contr_rec(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q, GenState& st) {
  return t.visit(overloaded{
      [&](const circ::BaseType& b) { return identity(b, st); },
      [&](const circ::ArrowType& a) {
        return arrow_clause(a, p + p + q, st, [&](const ContextAllocator& r) { return build_contr_rec(a.cod, p, q + r, st); });
      },
      [&](const circ::NextType& n) {
        Term inner = build_contr_rec(n.body, p.shifted(), q.shifted(), st);
        Context in = join({&p.at(0), &p.at(0), &q.at(0)});
        Context out = join({&p.at(0), &q.at(0)});
        return next_clause(n, in, p.shifted() + p.shifted() + q.shifted(), out, inner, st);
      },
  });
}

inline Term build_exchg_rec(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q,
                        const ContextAllocator& p2, const ContextAllocator& q2, GenState& st) {
  return t.visit(overloaded{
      [&](const circ::BaseType& b) { return identity(b, st); },
      [&](const circ::ArrowType& a) {
        return arrow_clause(a, p + q + p2 + q2, st,
                            [&](const ContextAllocator& r) { return build_exchg_rec(a.cod, p, q, p2, q2 + r, st); });
      },
      [&](const circ::NextType& n) {
        Term inner = build_exchg_rec(n.body, p.shifted(), q.shifted(), p2.shifted(), q2.shifted(), st);
        Context in = join({&p.at(0), &q.at(0), &p2.at(0), &q2.at(0)});
        Context out = join({&p.at(0), &p2.at(0), &q.at(0), &q2.at(0)});
        return next_clause(n, in, p.shifted() + q.shifted() + p2.shifted() + q2.shifted(), out, inner, st);
      },
  });
}

}  // namespace detail

/// Weakening from allocator `p` to `q`; requires `p(k)` to be a sublist of
/// `q(k)` at every stage.
inline Term build_weak(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q, GenState& st) {
  for (std::size_t k = 0; k < std::max(p.support(), q.support()); ++k)
    if (!detail::is_sublist(p.at(k), q.at(k)))
      throw Error(ErrorKind::PreconditionViolated,
                  "stage " + std::to_string(k) + " of the source allocator is not a sublist of the target", "Weak");
  return detail::build_weak_rec(t, p, q, st);
}

inline Term build_contr(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q, GenState& st) {
  return detail::build_contr_rec(t, p, q, st);
}

inline Term build_exchg(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q,
                        const ContextAllocator& p2, const ContextAllocator& q2, GenState& st) {
  return detail::build_exchg_rec(t, p, q, p2, q2, st);
}

/// Types the builders are expected to have.
inline Type weak_type(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q, GenState& st) {
  return arrow(extract_type(p, t, st), extract_type(q, t, st));
}
inline Type contr_type(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q, GenState& st) {
  return arrow(extract_type(p + p + q, t, st), extract_type(p + q, t, st));
}
inline Type exchg_type(const circ::Type& t, const ContextAllocator& p, const ContextAllocator& q,
                       const ContextAllocator& p2, const ContextAllocator& q2, GenState& st) {
  return arrow(extract_type(p + q + p2 + q2, t, st), extract_type(p + p2 + q + q2, t, st));
}

// ---------------------------------------------------------------------------
// Terms and judgments

namespace detail {

class TermTranslator {
 public:
  explicit TermTranslator(GenState& st) : st_(st) {}

  Term run(const PastGT& past, const FutureGT& future, const circ::Term& m) {
    const auto& ann = m.annotation();
    if (!ann) throw Error(ErrorKind::MalformedAnnotation, "unannotated subterm " + circ::format(m), "Term");
    const circ::Type& t = *ann;
    return m.visit(overloaded{
        [&](const circ::Var& v) {
          if (past.layers.empty()) mismatch("variable " + v.name + " with no current stage");
          const BindingGT* b = past.layers.back().find(v.name);
          if (!b) mismatch("variable " + v.name + " has no recorded translation");
          Term weak = detail::build_weak_rec(t, b->alloc, past.alloc() + future.alloc(), st_);
          return app(weak, var(v.name));
        },
        [&](const circ::Lam& l) {
          if (past.layers.empty()) mismatch("abstraction with no current stage");
          const auto* at = t.as<circ::ArrowType>();
          if (!at || !(at->dom == l.annot)) mismatch("abstraction annotated with " + circ::format(t));
          const circ::Type& cod = *l.body.annotation();
          BindingGT b = translate_binding(l.var, l.annot, st_);
          PastGT inner = past;
          inner.layers.back() = inner.layers.back().extended(b);
          Term exchg = detail::build_exchg_rec(cod, past.alloc(), b.alloc, future.alloc(), ContextAllocator{}, st_);
          Term body = app(exchg, run(inner, future, l.body));
          return cabs_all(b.cvars, lam(l.var, b.translated, body));
        },
        [&](const circ::App& a) {
          const auto& ft = a.fun.annotation();
          const auto* arr = ft ? ft->as<circ::ArrowType>() : nullptr;
          if (!arr) mismatch("application of a non-function");
          unsigned n = ctx_depth(arr->dom);
          ContextAllocator all = past.alloc() + future.alloc();
          Term f = run(past, future, a.fun);
          TypeSeqAllocator rall = all.range();
          for (unsigned k = 0; k < n; ++k) f = capp(f, rall.at(k));
          Term contr = detail::build_contr_rec(t, all.below(n), all.from(n), st_);
          return app(contr, app(f, run(past, future, a.arg)));
        },
        [&](const circ::Quo& q) {
          if (future.layers.empty()) mismatch("quotation with no recorded next stage");
          PastGT inner = past;
          inner.layers.push_back(future.layers.front());
          FutureGT rest{std::vector<ContextGT>(future.layers.begin() + 1, future.layers.end())};
          Context ctx = past.alloc().at(0);
          Context own = future.layers.front().context();
          ctx.insert(ctx.end(), own.begin(), own.end());
          return quo(std::move(ctx), run(inner, rest, q.body));
        },
        [&](const circ::Unq& u) {
          if (past.layers.empty()) mismatch("unquotation with no current stage");
          PastGT outer{std::vector<ContextGT>(past.layers.begin(), past.layers.end() - 1)};
          FutureGT ahead = future;
          ahead.layers.insert(ahead.layers.begin(), past.layers.back());
          std::vector<Name> args = dom(outer.alloc().at(0));
          for (const auto& b : past.layers.back().bindings) args.push_back(b.var);
          return unq(1, run(outer, ahead, u.body), vars_of(args));
        },
    });
  }

 private:
  [[noreturn]] static void mismatch(const std::string& msg) {
    throw Error(ErrorKind::GenerativeMismatch, msg, "Term");
  }
  GenState& st_;
};

}  // namespace detail

inline Term extract_term(const PastGT& past, const FutureGT& future, const circ::Term& m, GenState& st) {
  return detail::TermTranslator(st).run(past, future, m);
}

/// Everything one translation run produced.
struct Translation {
  PastGT past;
  FutureGT future;
  Judgment judgment;
};

inline NameSet source_names(const circ::PastStack& past, const circ::FutureStack& future, const circ::Term& m) {
  NameSet out;
  for (const auto& ctx : past) circ::collect_names(ctx, out);
  for (const auto& ctx : future) circ::collect_names(ctx, out);
  circ::collect_names(m, out);
  return out;
}

/// Translates the judgment `past | future |- m : T`. The term must carry
/// annotations (as produced by circ_synth).
inline Translation extract_judgment(const circ::PastStack& past, const circ::FutureStack& future, const circ::Term& m) {
  const auto& ann = m.annotation();
  if (!ann) throw Error(ErrorKind::MalformedAnnotation, "the root term carries no type", "Judgment");
  GenState st(source_names(past, future, m));
  Translation out{extract_past(past, st), extract_future(future, st), {{}, var("_"), base("_")}};
  Term term = extract_term(out.past, out.future, m, st);
  Type type = extract_type(out.past.alloc() + out.future.alloc(), *ann, st);
  out.judgment = Judgment{out.past.stack(), term, type};
  return out;
}

}  // namespace cmtt::extract
