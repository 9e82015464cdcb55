#pragma once

// Type-directed enumeration of well-typed K terms by exact AST size.
//
// Size counts one per node: variables 1, abstractions and quotations
// 1 + body, applications 1 + both sides, unquotations 1 + code + arguments.
// Only depth-1 unquotation is generated. Abstractions bind x<k> where k is
// the number of bindings already in the current context, so names repeat
// across levels and exercise capture avoidance.

#include <map>
#include <string>
#include <vector>

#include "cmtt/cmtt.hpp"

namespace cmtt::testing {

struct EnumConfig {
  std::vector<Type> annotations;
  std::vector<Context> quote_contexts;
};

struct Typed {
  Term term;
  Type type;
};

class Enumerator {
 public:
  explicit Enumerator(EnumConfig cfg) : cfg_(std::move(cfg)) {}

  const std::vector<Typed>& of_size(const ContextStack& stack, unsigned n) {
    std::string key = format(stack) + "#" + std::to_string(n);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    std::vector<Typed> out;
    if (n == 1 && !stack.empty()) {
      for (const auto& b : stack.back())
        if (!b.is_weakening()) out.push_back({var(b.name), std::get<Type>(b.sort)});
    }
    if (n >= 2 && !stack.empty()) {
      for (const auto& a : cfg_.annotations) {
        Name x = "x" + std::to_string(stack.back().size());
        ContextStack inner = stack;
        std::erase_if(inner.back(), [&](const Binding& b) { return b.name == x; });
        inner.back().push_back(term_binding(x, a));
        for (const auto& body : of_size(inner, n - 1)) out.push_back({lam(x, a, body.term), arrow(a, body.type)});
      }
    }
    if (n >= 3 && !stack.empty()) {
      for (unsigned k = 1; k + 1 < n; ++k) {
        const auto funs = of_size(stack, k);
        const auto args = of_size(stack, n - 1 - k);
        for (const auto& f : funs) {
          const auto* arr = f.type.as<ArrowType>();
          if (!arr) continue;
          for (const auto& a : args)
            if (alpha_equal(arr->dom, a.type)) out.push_back({app(f.term, a.term), arr->cod});
        }
      }
    }
    if (n >= 2) {
      for (const auto& ctx : cfg_.quote_contexts) {
        ContextStack inner = stack;
        inner.push_back(ctx);
        for (const auto& body : of_size(inner, n - 1)) out.push_back({quo(ctx, body.term), modal(rg(ctx), body.type)});
      }
    }
    if (n >= 2 && stack.size() >= 2) {
      ContextStack below(stack.begin(), stack.end() - 1);
      for (unsigned k = 1; k < n; ++k) {
        const auto codes = of_size(below, k);
        for (const auto& c : codes) {
          const auto* mt = c.type.as<ModalType>();
          if (!mt) continue;
          for (const auto& args : seqs(stack, mt->ctx, 0, n - 1 - k)) out.push_back({unq(1, c.term, args), mt->body});
        }
      }
    }
    return memo_.emplace(key, std::move(out)).first->second;
  }

  /// Every well-typed term of size 1..max under `stack`.
  std::vector<Typed> up_to(const ContextStack& stack, unsigned max) {
    std::vector<Typed> out;
    for (unsigned n = 1; n <= max; ++n) {
      const auto& level = of_size(stack, n);
      out.insert(out.end(), level.begin(), level.end());
    }
    return out;
  }

 private:
  std::vector<TermSeq> seqs(const ContextStack& stack, const TypeSeq& want, std::size_t from, unsigned n) {
    std::vector<TermSeq> out;
    if (from == want.size()) {
      if (n == 0) out.emplace_back();
      return out;
    }
    auto extend = [&](const Term& head, unsigned used) {
      for (auto rest : seqs(stack, want, from + 1, n - used)) {
        rest.insert(rest.begin(), head);
        out.push_back(std::move(rest));
      }
    };
    if (const auto* g = std::get_if<CVar>(&want[from])) {
      if (n == 0) return out;
      for (const auto& b : stack.back())
        if (const auto* c = std::get_if<CVar>(&b.sort); c && c->name == g->name) extend(var(b.name), 1);
      return out;
    }
    const Type& t = std::get<Type>(want[from]);
    for (unsigned k = 1; k <= n; ++k)
      for (const auto& m : of_size(stack, k))
        if (alpha_equal(m.type, t)) extend(m.term, k);
    return out;
  }

  EnumConfig cfg_;
  std::map<std::string, std::vector<Typed>> memo_;
};

/// The monomorphic configuration: one base type b.
inline EnumConfig base_config() {
  Type b = base("b");
  return {{b, arrow(b, b), modal({}, b), modal({b}, b)}, {Context{}, Context{term_binding("y", b)}}};
}

/// A configuration whose terms mention the free context variable g.
inline EnumConfig polymorphic_config() {
  Type b = base("b");
  TypeSeq g{CVar{"g"}};
  TypeSeq gb{CVar{"g"}, b};
  return {{b, modal(g, b), modal(gb, b)},
          {Context{}, Context{weak_binding("i", "g")}, Context{weak_binding("i", "g"), term_binding("y", b)}}};
}

}  // namespace cmtt::testing
