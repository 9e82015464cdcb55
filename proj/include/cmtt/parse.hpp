#pragma once

// Surface syntax shared by the three calculi.
//
//   types      b | A -> B | [A, g]C | forall g. T | next T (temporal only)
//   box terms  x | \x:T. M | M N | `{x:S, i:g} M | ~n{M}(N, i) | /\g. M
//              | M @ (S, g) | true | false | if M then N else L
//   temporal   x | \x:T. M | M N | `M | ~M
//
// `->` associates to the right, application to the left, `@` binds tighter
// than application, and abstractions, quotations and conditionals extend as
// far right as possible. A name in a type sequence or in a binding sort is a
// context variable when one of that name is in scope (bound by `forall`,
// `/\`, or a declaration's `cvars` header), otherwise a base type.
//
// A source file is a list of declarations:
//
//   box VARIANT NAME [stack CTXS] = TERM [: TYPE];
//   forallbox VARIANT NAME [cvars g, ...] [stack CTXS] = TERM [: TYPE];
//   circ NAME [past CTXS] [future CTXS] = TERM [: TYPE];
//
// where CTXS is `{...}; {...}` (object level or current stage last for
// stacks, next stage first for futures) or `.` for the empty stack.
// Comments run from `--` to the end of the line.

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cmtt/circ.hpp"
#include "cmtt/error.hpp"
#include "cmtt/syntax.hpp"
#include "cmtt/typecheck.hpp"

namespace cmtt {

enum class Calculus { Box, ForallBox, Circ };

inline std::string_view to_string(Calculus c) {
  switch (c) {
    case Calculus::Box: return "box";
    case Calculus::ForallBox: return "forallbox";
    case Calculus::Circ: return "circ";
  }
  return "?";
}

struct Declaration {
  Calculus calculus = Calculus::Box;
  std::optional<Variant> variant;
  Name name;
  unsigned line = 0;
  std::vector<Name> cvars;
  // Box calculi.
  ContextStack stack;
  std::optional<Term> term;
  std::optional<Type> expected;
  // Temporal calculus.
  circ::PastStack past;
  std::optional<circ::FutureStack> future;
  std::optional<circ::Term> circ_term;
  std::optional<circ::Type> circ_expected;
};

struct SourceFile {
  std::vector<Declaration> decls;
};

namespace detail {

struct Token {
  enum Kind { Ident, Number, Sym, End } kind;
  std::string text;
  unsigned line, col;
};

inline std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  unsigned line = 1, col = 1;
  std::size_t k = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j) {
      if (src[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++k;
    }
  };
  while (k < src.size()) {
    char c = src[k];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(k, 2) == "--") {
      while (k < src.size() && src[k] != '\n') advance(1);
      continue;
    }
    unsigned l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t e = k;
      while (e < src.size() && (std::isalnum(static_cast<unsigned char>(src[e])) || src[e] == '_' || src[e] == '\''))
        ++e;
      out.push_back({Token::Ident, std::string(src.substr(k, e - k)), l, cl});
      advance(e - k);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t e = k;
      while (e < src.size() && std::isdigit(static_cast<unsigned char>(src[e]))) ++e;
      out.push_back({Token::Number, std::string(src.substr(k, e - k)), l, cl});
      advance(e - k);
      continue;
    }
    for (std::string_view sym : {"/\\", "->"}) {
      if (src.substr(k, sym.size()) == sym) {
        out.push_back({Token::Sym, std::string(sym), l, cl});
        advance(sym.size());
        goto next_token;
      }
    }
    if (std::string_view("\\.:,;()[]{}`~@=").find(c) != std::string_view::npos) {
      out.push_back({Token::Sym, std::string(1, c), l, cl});
      advance(1);
      continue;
    }
    throw Error(ErrorKind::ParseError,
                "line " + std::to_string(l) + ", column " + std::to_string(cl) + ": unexpected character '" +
                    std::string(1, c) + "'");
  next_token:;
  }
  out.push_back({Token::End, "", line, col});
  return out;
}

inline bool is_keyword(const std::string& s) {
  static const char* const words[] = {"forall", "next", "if", "then", "else", "true", "false",
                                      "box", "forallbox", "circ", "cvars", "stack", "past", "future"};
  for (const char* w : words)
    if (s == w) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  void declare_cvars(const std::vector<Name>& cvars) { scope_.insert(scope_.end(), cvars.begin(), cvars.end()); }

  bool at_end() const { return peek().kind == Token::End; }
  void expect_end() {
    if (!at_end()) error("unexpected '" + peek().text + "'");
  }

  // ----- box calculi -------------------------------------------------------

  Type type() {
    if (accept_word("forall")) {
      Name g = ident("context variable");
      expect(".");
      scope_.push_back(g);
      Type body = type();
      scope_.pop_back();
      return forall(g, body);
    }
    Type dom = prefix_type();
    if (accept("->")) return arrow(dom, type());
    return dom;
  }

  TypeSeq type_seq(const char* close) {
    TypeSeq out;
    if (peek_is(close)) return out;
    do out.push_back(seq_entry(close));
    while (accept(","));
    return out;
  }

  Context context() {
    expect("{");
    Context out;
    if (!peek_is("}")) {
      do {
        Name x = ident("variable");
        expect(":");
        if (peek().kind == Token::Ident && in_scope(peek().text) && (peek_is(",", 1) || peek_is("}", 1)))
          out.push_back(weak_binding(x, next().text));
        else
          out.push_back(term_binding(x, type()));
      } while (accept(","));
    }
    expect("}");
    return out;
  }

  ContextStack stack() {
    ContextStack out;
    if (accept(".")) return out;
    do out.push_back(context());
    while (accept(";"));
    return out;
  }

  Term term() {
    if (accept("\\")) {
      Name x = ident("variable");
      expect(":");
      Type t = type();
      expect(".");
      return lam(x, t, term());
    }
    if (accept("/\\")) {
      Name g = ident("context variable");
      expect(".");
      scope_.push_back(g);
      Term body = term();
      scope_.pop_back();
      return cabs(g, body);
    }
    if (peek_is("`")) {
      next();
      Context ctx = context();
      return quo(ctx, term());
    }
    if (accept_word("if")) {
      Term c = term();
      expect_word("then");
      Term a = term();
      expect_word("else");
      Term b = term();
      return app(app(app(constant("if"), c), a), b);
    }
    Term head = postfix();
    while (true) {
      if (starts_open_box()) return app(head, term());
      if (!starts_atom_box()) return head;
      head = app(head, postfix());
    }
  }

  // ----- temporal calculus -------------------------------------------------

  circ::Type circ_type() {
    circ::Type dom = circ_prefix_type();
    if (accept("->")) return circ::arrow(dom, circ_type());
    return dom;
  }

  circ::Context circ_context() {
    expect("{");
    circ::Context out;
    if (!peek_is("}")) {
      do {
        Name x = ident("variable");
        expect(":");
        out.push_back({x, circ_type()});
      } while (accept(","));
    }
    expect("}");
    return out;
  }

  std::vector<circ::Context> circ_stack() {
    std::vector<circ::Context> out;
    if (accept(".")) return out;
    do out.push_back(circ_context());
    while (accept(";"));
    return out;
  }

  circ::Term circ_term() {
    if (peek_is("\\")) return circ_lambda();
    circ::Term head = circ_prefix();
    while (true) {
      if (peek_is("\\")) return circ::app(head, circ_lambda());
      if (!starts_atom_circ()) return head;
      head = circ::app(head, circ_prefix());
    }
  }

  // ----- declarations ------------------------------------------------------

  SourceFile file() {
    SourceFile out;
    while (!at_end()) {
      Declaration d = declaration();
      for (const auto& prev : out.decls)
        if (prev.name == d.name) error("declaration " + d.name + " is defined twice", d.line);
      out.decls.push_back(std::move(d));
    }
    return out;
  }

 private:
  Declaration declaration() {
    Declaration d;
    d.line = peek().line;
    std::string tag = peek().text;
    if (tag == "box" || tag == "forallbox") {
      next();
      d.calculus = tag == "box" ? Calculus::Box : Calculus::ForallBox;
      std::string v = ident("variant (k, t, k4 or s4)");
      d.variant = parse_variant(v);
      if (!d.variant) error("unknown variant '" + v + "'");
      d.name = ident("declaration name");
      std::size_t mark = scope_.size();
      d.stack = {Context{}};
      while (!peek_is("=")) {
        if (accept_word("cvars")) {
          if (d.calculus == Calculus::Box) error("cvars requires a forallbox declaration");
          do d.cvars.push_back(ident("context variable"));
          while (accept(","));
          declare_cvars(d.cvars);
        } else if (accept_word("stack")) {
          d.stack = stack();
        } else {
          error("expected cvars, stack or '='");
        }
      }
      expect("=");
      d.term = term();
      if (accept(":")) d.expected = type();
      expect(";");
      scope_.resize(mark);
      return d;
    }
    if (tag == "circ") {
      next();
      d.calculus = Calculus::Circ;
      d.name = ident("declaration name");
      d.past = {circ::Context{}};
      while (!peek_is("=")) {
        if (accept_word("past"))
          d.past = circ_stack();
        else if (accept_word("future"))
          d.future = circ_stack();
        else
          error("expected past, future or '='");
      }
      expect("=");
      d.circ_term = circ_term();
      if (accept(":")) d.circ_expected = circ_type();
      expect(";");
      return d;
    }
    error("expected box, forallbox or circ");
  }

  Type prefix_type() {
    if (accept("[")) {
      TypeSeq seq = type_seq("]");
      expect("]");
      return modal(seq, prefix_type());
    }
    if (accept("(")) {
      Type t = type();
      expect(")");
      return t;
    }
    const Token& t = peek();
    Name n = ident("type");
    if (in_scope(n)) error("context variable " + n + " used as a type", t.line, t.col);
    return base(n);
  }

  SeqEntry seq_entry(const char* close) {
    if (peek().kind == Token::Ident && in_scope(peek().text) && (peek_is(",", 1) || peek_is(close, 1)))
      return CVar{next().text};
    return type();
  }

  bool starts_atom_box() const {
    const Token& t = peek();
    if (t.kind == Token::Ident) return !is_keyword(t.text) || t.text == "true" || t.text == "false";
    return t.kind == Token::Sym && (t.text == "(" || t.text == "~");
  }

  bool starts_open_box() const {
    const Token& t = peek();
    if (t.kind == Token::Ident) return t.text == "if";
    return t.kind == Token::Sym && (t.text == "\\" || t.text == "/\\" || t.text == "`");
  }

  Term postfix() {
    Term m = atom();
    while (accept("@")) {
      expect("(");
      TypeSeq tys = type_seq(")");
      expect(")");
      m = capp(m, tys);
    }
    return m;
  }

  Term atom() {
    if (accept("(")) {
      Term m = term();
      expect(")");
      return m;
    }
    if (accept("~")) {
      const Token& n = peek();
      if (n.kind != Token::Number) error("expected an unquotation depth");
      unsigned level = static_cast<unsigned>(std::stoul(next().text));
      expect("{");
      Term code = term();
      expect("}");
      expect("(");
      TermSeq args;
      if (!peek_is(")")) {
        do args.push_back(term());
        while (accept(","));
      }
      expect(")");
      return unq(level, code, args);
    }
    if (accept_word("true")) return constant("true");
    if (accept_word("false")) return constant("false");
    return var(ident("term"));
  }

  circ::Type circ_prefix_type() {
    if (accept_word("next")) return circ::next(circ_prefix_type());
    if (accept("(")) {
      circ::Type t = circ_type();
      expect(")");
      return t;
    }
    return circ::base(ident("type"));
  }

  circ::Term circ_lambda() {
    expect("\\");
    Name x = ident("variable");
    expect(":");
    circ::Type t = circ_type();
    expect(".");
    return circ::lam(x, t, circ_term());
  }

  circ::Term circ_operand() { return peek_is("\\") ? circ_lambda() : circ_prefix(); }

  circ::Term circ_prefix() {
    if (accept("`")) return circ::quo(circ_operand());
    if (accept("~")) return circ::unq(circ_operand());
    if (accept("(")) {
      circ::Term m = circ_term();
      expect(")");
      return m;
    }
    return circ::var(ident("term"));
  }

  bool starts_atom_circ() const {
    const Token& t = peek();
    if (t.kind == Token::Ident) return !is_keyword(t.text);
    return t.kind == Token::Sym && (t.text == "(" || t.text == "`" || t.text == "~");
  }

  // ----- token helpers -----------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool peek_is(std::string_view sym, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Sym && t.text == sym;
  }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  bool accept(std::string_view sym) {
    if (!peek_is(sym)) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view w) {
    if (peek().kind != Token::Ident || peek().text != w) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) error("expected '" + std::string(sym) + "'");
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) error("expected '" + std::string(w) + "'");
  }
  Name ident(const char* what) {
    const Token& t = peek();
    if (t.kind != Token::Ident || is_keyword(t.text)) error(std::string("expected ") + what);
    return next().text;
  }
  bool in_scope(const Name& n) const {
    for (const auto& g : scope_)
      if (g == n) return true;
    return false;
  }
  [[noreturn]] void error(const std::string& msg, unsigned line = 0, unsigned col = 0) const {
    const Token& t = peek();
    if (line == 0) {
      line = t.line;
      col = t.col;
    }
    std::string where = "line " + std::to_string(line) + (col ? ", column " + std::to_string(col) : "");
    std::string found = t.kind == Token::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorKind::ParseError, where + ": " + msg + " (found " + found + ")");
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Name> scope_;
};

}  // namespace detail

inline Type parse_type(std::string_view src, const std::vector<Name>& cvars = {}) {
  detail::Parser p(src);
  p.declare_cvars(cvars);
  Type t = p.type();
  p.expect_end();
  return t;
}

inline TypeSeq parse_type_seq(std::string_view src, const std::vector<Name>& cvars = {}) {
  detail::Parser p(src);
  p.declare_cvars(cvars);
  TypeSeq s = p.type_seq("");
  p.expect_end();
  return s;
}

inline Term parse_term(std::string_view src, const std::vector<Name>& cvars = {}) {
  detail::Parser p(src);
  p.declare_cvars(cvars);
  Term m = p.term();
  p.expect_end();
  return m;
}

inline Context parse_context(std::string_view src, const std::vector<Name>& cvars = {}) {
  detail::Parser p(src);
  p.declare_cvars(cvars);
  Context c = p.context();
  p.expect_end();
  return c;
}

inline ContextStack parse_stack(std::string_view src, const std::vector<Name>& cvars = {}) {
  detail::Parser p(src);
  p.declare_cvars(cvars);
  ContextStack s = p.stack();
  p.expect_end();
  return s;
}

inline circ::Type parse_circ_type(std::string_view src) {
  detail::Parser p(src);
  circ::Type t = p.circ_type();
  p.expect_end();
  return t;
}

inline circ::Term parse_circ_term(std::string_view src) {
  detail::Parser p(src);
  circ::Term m = p.circ_term();
  p.expect_end();
  return m;
}

inline std::vector<circ::Context> parse_circ_stack(std::string_view src) {
  detail::Parser p(src);
  auto s = p.circ_stack();
  p.expect_end();
  return s;
}

inline SourceFile parse_file(std::string_view src) { return detail::Parser(src).file(); }

}  // namespace cmtt
