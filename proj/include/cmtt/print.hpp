#pragma once

// Surface-syntax rendering of box-calculus objects. The output is accepted
// by the parser in parse.hpp and re-parses to an alpha-equal object.

#include <optional>
#include <sstream>
#include <string>

#include "cmtt/syntax.hpp"

namespace cmtt {

namespace detail {

inline void print_type(std::ostream& os, const Type& t, bool top);

inline void print_entry(std::ostream& os, const SeqEntry& e) {
  if (const auto* c = std::get_if<CVar>(&e))
    os << c->name;
  else
    print_type(os, std::get<Type>(e), true);
}

inline void print_seq(std::ostream& os, const TypeSeq& seq) {
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (k) os << ", ";
    print_entry(os, seq[k]);
  }
}

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
      [&](const ModalType& m) {
        os << '[';
        print_seq(os, m.ctx);
        os << ']';
        print_type(os, m.body, false);
      },
      [&](const ForallType& f) {
        if (!top) os << '(';
        os << "forall " << f.cvar << ". ";
        print_type(os, f.body, true);
        if (!top) os << ')';
      },
  });
}

inline void print_binding(std::ostream& os, const Binding& b) {
  os << b.name << ':';
  if (const auto* c = std::get_if<CVar>(&b.sort)) {
    os << c->name;
  } else {
    const Type& t = std::get<Type>(b.sort);
    print_type(os, t, !t.as<ForallType>());
  }
}

inline void print_context(std::ostream& os, const Context& ctx) {
  os << '{';
  for (std::size_t k = 0; k < ctx.size(); ++k) {
    if (k) os << ", ";
    print_binding(os, ctx[k]);
  }
  os << '}';
}

// Precedence of a term position: 0 admits everything, 1 is the function
// part of an application, 2 an argument or the operand of `@`.
enum class TermPos { Top = 0, Fun = 1, Arg = 2 };

struct IfSpine {
  Term cond, then_branch, else_branch;
};

inline std::optional<IfSpine> as_if(const Term& m) {
  const auto* a3 = m.as<App>();
  if (!a3) return std::nullopt;
  const auto* a2 = a3->fun.as<App>();
  if (!a2) return std::nullopt;
  const auto* a1 = a2->fun.as<App>();
  if (!a1) return std::nullopt;
  const auto* c = a1->fun.as<Const>();
  if (!c || c->name != "if") return std::nullopt;
  return IfSpine{a1->arg, a2->arg, a3->arg};
}

inline void print_term(std::ostream& os, const Term& m, TermPos pos);

inline void print_open(std::ostream& os, TermPos pos, auto&& body) {
  bool paren = pos != TermPos::Top;
  if (paren) os << '(';
  body();
  if (paren) os << ')';
}

inline void print_term(std::ostream& os, const Term& m, TermPos pos) {
  if (auto spine = as_if(m)) {
    print_open(os, pos, [&] {
      os << "if ";
      print_term(os, spine->cond, TermPos::Top);
      os << " then ";
      print_term(os, spine->then_branch, TermPos::Top);
      os << " else ";
      print_term(os, spine->else_branch, TermPos::Top);
    });
    return;
  }
  m.visit(overloaded{
      [&](const Var& v) { os << v.name; },
      [&](const Const& c) { os << c.name; },
      [&](const Lam& l) {
        print_open(os, pos, [&] {
          os << '\\' << l.var << ':';
          print_type(os, l.annot, !l.annot.as<ForallType>());
          os << ". ";
          print_term(os, l.body, TermPos::Top);
        });
      },
      [&](const CAbs& c) {
        print_open(os, pos, [&] {
          os << "/\\" << c.cvar << ". ";
          print_term(os, c.body, TermPos::Top);
        });
      },
      [&](const Quo& q) {
        print_open(os, pos, [&] {
          os << '`';
          print_context(os, q.ctx);
          os << ' ';
          print_term(os, q.body, TermPos::Top);
        });
      },
      [&](const App& a) {
        bool paren = pos == TermPos::Arg;
        if (paren) os << '(';
        print_term(os, a.fun, TermPos::Fun);
        os << ' ';
        print_term(os, a.arg, TermPos::Arg);
        if (paren) os << ')';
      },
      [&](const Unq& u) {
        os << '~' << u.level << '{';
        print_term(os, u.code, TermPos::Top);
        os << "}(";
        for (std::size_t k = 0; k < u.args.size(); ++k) {
          if (k) os << ", ";
          print_term(os, u.args[k], TermPos::Top);
        }
        os << ')';
      },
      [&](const CApp& c) {
        print_term(os, c.code, TermPos::Arg);
        os << " @ (";
        print_seq(os, c.tys);
        os << ')';
      },
  });
}

}  // namespace detail

inline std::string format(const Type& t) {
  std::ostringstream os;
  detail::print_type(os, t, true);
  return os.str();
}

inline std::string format(const TypeSeq& seq) {
  std::ostringstream os;
  os << '(';
  detail::print_seq(os, seq);
  os << ')';
  return os.str();
}

inline std::string format(const Context& ctx) {
  std::ostringstream os;
  detail::print_context(os, ctx);
  return os.str();
}

/// Contexts separated by `;`, object level last. The empty stack is `.`.
inline std::string format(const ContextStack& stack) {
  if (stack.empty()) return ".";
  std::ostringstream os;
  for (std::size_t k = 0; k < stack.size(); ++k) {
    if (k) os << "; ";
    detail::print_context(os, stack[k]);
  }
  return os.str();
}

inline std::string format(const Term& m) {
  std::ostringstream os;
  detail::print_term(os, m, detail::TermPos::Top);
  return os.str();
}

inline std::string format(const TermSeq& seq) {
  std::ostringstream os;
  os << '(';
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (k) os << ", ";
    detail::print_term(os, seq[k], detail::TermPos::Top);
  }
  os << ')';
  return os.str();
}

inline std::string format(const Judgment& j) {
  return format(j.stack) + " |- " + format(j.term) + " : " + format(j.type);
}

}  // namespace cmtt
