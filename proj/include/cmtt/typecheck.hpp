#pragma once

// Syntax-directed type synthesis for the box calculus and its
// polymorphic-context extension, parameterised by the modal variant.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cmtt/error.hpp"
#include "cmtt/print.hpp"
#include "cmtt/subst.hpp"
#include "cmtt/syntax.hpp"

namespace cmtt {

enum class Variant { K, T, K4, S4 };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::K: return "k";
    case Variant::T: return "t";
    case Variant::K4: return "k4";
    case Variant::S4: return "s4";
  }
  return "?";
}

inline std::optional<Variant> parse_variant(std::string_view s) {
  if (s == "k" || s == "K") return Variant::K;
  if (s == "t" || s == "T") return Variant::T;
  if (s == "k4" || s == "K4") return Variant::K4;
  if (s == "s4" || s == "S4") return Variant::S4;
  return std::nullopt;
}

/// Unquotation depths admitted by each variant: K only 1, T 0 or 1, K4 any
/// positive depth, S4 any depth.
inline bool permits(Variant v, unsigned n) {
  switch (v) {
    case Variant::K: return n == 1;
    case Variant::T: return n <= 1;
    case Variant::K4: return n >= 1;
    case Variant::S4: return true;
  }
  return false;
}

/// Built-in constants: booleans and the conditional.
inline std::optional<Type> constant_type(const Name& c) {
  Type b = base("bool");
  if (c == "true" || c == "false") return b;
  if (c == "if") return arrow(b, arrow(b, arrow(b, b)));
  return std::nullopt;
}

namespace detail {

class Checker {
 public:
  explicit Checker(Variant v) : variant_(v) {}

  Type synth(const ContextStack& stack, const Term& m) {
    return m.visit(overloaded{
        [&](const Var& v) { return synth_var(stack, v); },
        [&](const Const& c) -> Type {
          if (auto t = constant_type(c.name)) return *t;
          fail(ErrorKind::UnboundVariable, "unknown constant " + c.name, "Const", stack);
        },
        [&](const Lam& l) { return synth_lam(stack, l); },
        [&](const App& a) { return synth_app(stack, a); },
        [&](const Quo& q) { return synth_quo(stack, q); },
        [&](const Unq& u) { return synth_unq(stack, u); },
        [&](const CAbs& c) { return synth_cabs(stack, c); },
        [&](const CApp& c) { return synth_capp(stack, c); },
    });
  }

  TypeSeq synth_seq(const ContextStack& stack, const TermSeq& seq, unsigned first_index) {
    TypeSeq out;
    for (std::size_t k = 0; k < seq.size(); ++k) {
      path_.push_back(first_index + static_cast<unsigned>(k));
      const auto* v = seq[k].as<Var>();
      const Binding* b = v && !stack.empty() ? lookup(stack.back(), v->name) : nullptr;
      if (b && b->is_weakening())
        out.push_back(b->sort);
      else
        out.push_back(synth(stack, seq[k]));
      path_.pop_back();
    }
    return out;
  }

 private:
  [[noreturn]] void fail(ErrorKind kind, const std::string& msg, const std::string& rule,
                         const ContextStack& stack) const {
    throw Error(kind, msg, rule, path_, format(stack));
  }

  Type synth_var(const ContextStack& stack, const Var& v) {
    if (stack.empty()) fail(ErrorKind::UnboundVariable, "variable " + v.name + " under an empty stack", "Var", stack);
    const Binding* b = lookup(stack.back(), v.name);
    if (!b) fail(ErrorKind::UnboundVariable, "variable " + v.name + " is not bound in the current context", "Var", stack);
    if (b->is_weakening())
      fail(ErrorKind::UnboundVariable, v.name + " is a weakening variable, not a term variable", "Var", stack);
    return std::get<Type>(b->sort);
  }

  Type synth_lam(const ContextStack& stack, const Lam& l) {
    if (stack.empty()) fail(ErrorKind::IllFormedJudgment, "abstraction under an empty stack", "Abs", stack);
    ContextStack inner = stack;
    Context& top = inner.back();
    // A binder already in the domain is alpha-renamed; shadowing the old
    // entry is the same thing for name lookup.
    std::erase_if(top, [&](const Binding& b) { return b.name == l.var; });
    top.push_back(term_binding(l.var, l.annot));
    path_.push_back(0);
    Type body = synth(inner, l.body);
    path_.pop_back();
    return arrow(l.annot, body);
  }

  Type synth_app(const ContextStack& stack, const App& a) {
    if (stack.empty()) fail(ErrorKind::IllFormedJudgment, "application under an empty stack", "App", stack);
    path_.push_back(0);
    Type f = synth(stack, a.fun);
    path_.pop_back();
    const auto* fa = f.as<ArrowType>();
    if (!fa) fail(ErrorKind::NotAFunction, "expected a function, found " + format(f), "App", stack);
    path_.push_back(1);
    Type x = synth(stack, a.arg);
    path_.pop_back();
    if (!alpha_equal(fa->dom, x))
      fail(ErrorKind::TypeMismatch, "argument has type " + format(x) + " but " + format(fa->dom) + " was expected",
           "App", stack);
    return fa->cod;
  }

  Type synth_quo(const ContextStack& stack, const Quo& q) {
    if (!has_distinct_domain(q.ctx))
      fail(ErrorKind::DuplicateBinder, "quotation context " + format(q.ctx) + " repeats a binder", "Quo", stack);
    ContextStack inner = stack;
    inner.push_back(q.ctx);
    path_.push_back(0);
    Type body = synth(inner, q.body);
    path_.pop_back();
    return modal(rg(q.ctx), body);
  }

  Type synth_unq(const ContextStack& stack, const Unq& u) {
    if (!permits(variant_, u.level))
      fail(ErrorKind::LevelViolation,
           "unquotation depth " + std::to_string(u.level) + " is not permitted in variant " +
               std::string(to_string(variant_)),
           "Unq", stack);
    if (stack.size() < u.level)
      fail(ErrorKind::LevelViolation,
           "unquotation depth " + std::to_string(u.level) + " exceeds the stack height " +
               std::to_string(stack.size()),
           "Unq", stack);
    ContextStack outer(stack.begin(), stack.end() - u.level);
    path_.push_back(0);
    Type code = synth(outer, u.code);
    path_.pop_back();
    const auto* mt = code.as<ModalType>();
    if (!mt) fail(ErrorKind::NotACode, "expected code, found " + format(code), "Unq", stack);
    for (std::size_t k = 0; k < std::min(u.args.size(), mt->ctx.size()); ++k) {
      const auto* v = u.args[k].as<Var>();
      if (v && std::holds_alternative<CVar>(mt->ctx[k]) && (stack.empty() || !lookup(stack.back(), v->name)))
        fail(ErrorKind::UnboundWeakeningVariable, "weakening variable " + v->name + " is not bound in the current context",
             "SeqC", stack);
    }
    TypeSeq args = synth_seq(stack, u.args, 1);
    if (!alpha_equal(args, mt->ctx))
      fail(ErrorKind::ContextMismatch,
           "arguments have types " + format(args) + " but the code expects " + format(mt->ctx), "Unq", stack);
    return mt->body;
  }

  Type synth_cabs(const ContextStack& stack, const CAbs& c) {
    if (free_context_vars(stack).contains(c.cvar))
      fail(ErrorKind::CVarEscape, "context variable " + c.cvar + " is free in the stack", "Poly", stack);
    path_.push_back(0);
    Type body = synth(stack, c.body);
    path_.pop_back();
    return forall(c.cvar, body);
  }

  Type synth_capp(const ContextStack& stack, const CApp& c) {
    path_.push_back(0);
    Type code = synth(stack, c.code);
    path_.pop_back();
    const auto* ft = code.as<ForallType>();
    if (!ft) fail(ErrorKind::NotPolymorphic, "expected a polymorphic type, found " + format(code), "Inst", stack);
    return ctx_subst(ft->body, c.tys, ft->cvar);
  }

  Variant variant_;
  std::vector<unsigned> path_;
};

}  // namespace detail

inline Type synth(Variant v, const ContextStack& stack, const Term& m) {
  return detail::Checker(v).synth(stack, m);
}

inline TypeSeq synth_seq(Variant v, const ContextStack& stack, const TermSeq& seq) {
  return detail::Checker(v).synth_seq(stack, seq, 0);
}

inline void check(Variant v, const ContextStack& stack, const Term& m, const Type& expected) {
  Type actual = synth(v, stack, m);
  if (!alpha_equal(actual, expected))
    throw Error(ErrorKind::TypeMismatch, "synthesized " + format(actual) + " but " + format(expected) + " was expected",
                "check", {}, format(stack));
}

inline void check(Variant v, const Judgment& j) { check(v, j.stack, j.term, j.type); }

/// Non-throwing convenience for property suites.
inline std::optional<Type> try_synth(Variant v, const ContextStack& stack, const Term& m) {
  try {
    return synth(v, stack, m);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace cmtt
