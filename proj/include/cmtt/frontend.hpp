#pragma once

// Batch processing of source files: every declaration is checked and then
// run through the requested command. Results are plain structs; rendering
// is left to the caller.

#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cmtt/circ.hpp"
#include "cmtt/error.hpp"
#include "cmtt/extraction.hpp"
#include "cmtt/parse.hpp"
#include "cmtt/print.hpp"
#include "cmtt/reduce.hpp"
#include "cmtt/stlc.hpp"
#include "cmtt/typecheck.hpp"

namespace cmtt {

enum class Command { Check, Normalize, Translate, Erase };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::Check: return "check";
    case Command::Normalize: return "normalize";
    case Command::Translate: return "translate";
    case Command::Erase: return "erase";
  }
  return "?";
}

enum class Status { Ok, Failed, Skipped };

inline std::string_view to_string(Status s) {
  switch (s) {
    case Status::Ok: return "ok";
    case Status::Failed: return "failed";
    case Status::Skipped: return "skipped";
  }
  return "?";
}

struct Options {
  Command command = Command::Check;
  std::optional<Variant> variant;
  std::size_t fuel = default_fuel;
};

struct Failure {
  ErrorKind kind;
  std::string message;
  std::string rule;
  std::vector<unsigned> path;
  std::string stack;
};

struct DeclReport {
  Name name;
  Calculus calculus = Calculus::Box;
  std::string variant;
  unsigned line = 0;
  Status status = Status::Ok;
  std::string judgment;  // the checked input, with its synthesized type
  std::string type;
  std::string output;  // normal form, erased term or translated declaration
  std::string output_type;
  std::optional<Failure> failure;
};

struct FileReport {
  std::string file;
  std::optional<Failure> parse_failure;
  std::vector<DeclReport> decls;

  bool ok() const {
    if (parse_failure) return false;
    for (const auto& d : decls)
      if (d.status == Status::Failed) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Detection of context polymorphism, which plain box declarations reject.

inline bool polymorphic(const Type& t);

inline bool polymorphic(const TypeSeq& seq) {
  for (const auto& e : seq)
    if (std::holds_alternative<CVar>(e) || polymorphic(std::get<Type>(e))) return true;
  return false;
}

inline bool polymorphic(const Type& t) {
  return t.visit(overloaded{
      [](const BaseType&) { return false; },
      [](const ArrowType& a) { return polymorphic(a.dom) || polymorphic(a.cod); },
      [](const ModalType& m) { return polymorphic(m.ctx) || polymorphic(m.body); },
      [](const ForallType&) { return true; },
  });
}

inline bool polymorphic(const Context& ctx) {
  for (const auto& b : ctx)
    if (b.is_weakening() || polymorphic(std::get<Type>(b.sort))) return true;
  return false;
}

inline bool polymorphic(const Term& m) {
  return m.visit(overloaded{
      [](const Var&) { return false; },
      [](const Const&) { return false; },
      [](const Lam& l) { return polymorphic(l.annot) || polymorphic(l.body); },
      [](const App& a) { return polymorphic(a.fun) || polymorphic(a.arg); },
      [](const Quo& q) { return polymorphic(q.ctx) || polymorphic(q.body); },
      [](const Unq& u) {
        if (polymorphic(u.code)) return true;
        for (const auto& a : u.args)
          if (polymorphic(a)) return true;
        return false;
      },
      [](const CAbs&) { return true; },
      [](const CApp&) { return true; },
  });
}

// ---------------------------------------------------------------------------

/// A translated judgment as a `forallbox k` declaration that parses back.
inline std::string translated_declaration(const Name& name, const Judgment& j) {
  NameSet cvars = free_context_vars(j.stack);
  cvars.merge(free_context_vars(j.term));
  cvars.merge(free_context_vars(TypeSeq{j.type}));
  std::ostringstream os;
  os << "forallbox k " << name;
  if (!cvars.empty()) {
    os << " cvars ";
    bool first = true;
    for (const auto& g : cvars) {
      os << (first ? "" : ", ") << g;
      first = false;
    }
  }
  os << " stack " << format(j.stack) << " = " << format(j.term) << " : " << format(j.type) << ';';
  return os.str();
}

namespace detail {

inline Failure to_failure(const Error& e) {
  return {e.kind(), e.detail(), e.rule(), e.path(), e.stack()};
}

inline void run_box(const Declaration& d, const Options& opt, DeclReport& r) {
  const Variant v = opt.variant.value_or(*d.variant);
  r.variant = std::string(to_string(v));
  const Term& m = *d.term;
  if (d.calculus == Calculus::Box &&
      (polymorphic(m) || (d.expected && polymorphic(*d.expected)) ||
       [&] {
         for (const auto& c : d.stack)
           if (polymorphic(c)) return true;
         return false;
       }()))
    throw Error(ErrorKind::Unsupported, "context polymorphism needs a forallbox declaration");
  Type t = synth(v, d.stack, m);
  r.judgment = format(Judgment{d.stack, m, t});
  r.type = format(t);
  if (d.expected && !alpha_equal(t, *d.expected))
    throw Error(ErrorKind::TypeMismatch, "declared " + format(*d.expected) + " but synthesized " + format(t));

  switch (opt.command) {
    case Command::Check:
      return;
    case Command::Normalize: {
      Term nf = normalize(m, opt.fuel);
      Type nt = synth(v, d.stack, nf);
      if (!alpha_equal(nt, t))
        throw Error(ErrorKind::TypeMismatch, "normal form has type " + format(nt) + " instead of " + format(t));
      r.output = format(nf);
      r.output_type = format(nt);
      return;
    }
    case Command::Erase: {
      stlc::Judgment e = stlc::erase(Judgment{d.stack, m, t});
      stlc::Type et = stlc::stlc_synth(e.ctx, e.term);
      if (!(et == e.type))
        throw Error(ErrorKind::TypeMismatch, "erasure has type " + stlc::format(et) + " instead of " + stlc::format(e.type));
      r.output = stlc::format(e.term);
      r.output_type = stlc::format(e.type);
      return;
    }
    case Command::Translate:
      r.status = Status::Skipped;
      return;
  }
}

inline void run_circ(const Declaration& d, const Options& opt, DeclReport& r) {
  const circ::Term& m = *d.circ_term;
  circ::FutureStack future = d.future.value_or(circ::default_future(m));
  circ::Synthesis s = circ::circ_synth(d.past, future, m);
  r.judgment = circ::format(d.past) + " | " + circ::format(future) + " |- " + circ::format(m) + " : " +
               circ::format(s.type);
  r.type = circ::format(s.type);
  if (d.circ_expected && !(s.type == *d.circ_expected))
    throw Error(ErrorKind::TypeMismatch,
                "declared " + circ::format(*d.circ_expected) + " but synthesized " + circ::format(s.type));
  if (opt.command != Command::Translate) {
    if (opt.command != Command::Check) r.status = Status::Skipped;
    return;
  }
  extract::Translation tr = extract::extract_judgment(d.past, future, s.annotated);
  const Judgment& j = tr.judgment;
  Type got = synth(Variant::K, j.stack, j.term);
  if (!alpha_equal(got, j.type))
    throw Error(ErrorKind::TypeMismatch, "translation has type " + format(got) + " instead of " + format(j.type));
  r.output = translated_declaration(d.name, j);
  r.output_type = format(j.type);
}

}  // namespace detail

inline DeclReport process_declaration(const Declaration& d, const Options& opt) {
  DeclReport r;
  r.name = d.name;
  r.calculus = d.calculus;
  r.line = d.line;
  try {
    if (d.calculus == Calculus::Circ)
      detail::run_circ(d, opt, r);
    else
      detail::run_box(d, opt, r);
  } catch (const Error& e) {
    r.status = Status::Failed;
    r.failure = detail::to_failure(e);
  }
  return r;
}

inline FileReport process_source(std::string_view src, std::string file, const Options& opt) {
  FileReport out;
  out.file = std::move(file);
  SourceFile sf;
  try {
    sf = parse_file(src);
  } catch (const Error& e) {
    out.parse_failure = detail::to_failure(e);
    return out;
  }
  for (const auto& d : sf.decls) out.decls.push_back(process_declaration(d, opt));
  return out;
}

/// Reads and processes `path`; an unreadable file is reported as a parse
/// failure.
inline FileReport process_file(const std::string& path, const Options& opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    FileReport out;
    out.file = path;
    out.parse_failure = Failure{ErrorKind::ParseError, "cannot open " + path, {}, {}, {}};
    return out;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return process_source(buf.str(), path, opt);
}

}  // namespace cmtt
