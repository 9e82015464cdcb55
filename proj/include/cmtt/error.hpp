#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cmtt {

enum class ErrorKind {
  UnboundVariable,
  UnboundWeakeningVariable,
  IllFormedJudgment,
  DuplicateBinder,
  LevelViolation,
  ContextMismatch,
  NotAFunction,
  NotACode,
  NotPolymorphic,
  CVarEscape,
  TypeMismatch,
  FuelExhausted,
  NotExpandable,
  EmptyFuture,
  EmptyPast,
  NotACircType,
  PreconditionViolated,
  MalformedAnnotation,
  GenerativeMismatch,
  StackDomainsOverlap,
  NotErasable,
  ParseError,
  Unsupported,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::UnboundWeakeningVariable: return "UnboundWeakeningVariable";
    case ErrorKind::IllFormedJudgment: return "IllFormedJudgment";
    case ErrorKind::DuplicateBinder: return "DuplicateBinder";
    case ErrorKind::LevelViolation: return "LevelViolation";
    case ErrorKind::ContextMismatch: return "ContextMismatch";
    case ErrorKind::NotAFunction: return "NotAFunction";
    case ErrorKind::NotACode: return "NotACode";
    case ErrorKind::NotPolymorphic: return "NotPolymorphic";
    case ErrorKind::CVarEscape: return "CVarEscape";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::FuelExhausted: return "FuelExhausted";
    case ErrorKind::NotExpandable: return "NotExpandable";
    case ErrorKind::EmptyFuture: return "EmptyFuture";
    case ErrorKind::EmptyPast: return "EmptyPast";
    case ErrorKind::NotACircType: return "NotACircType";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::MalformedAnnotation: return "MalformedAnnotation";
    case ErrorKind::GenerativeMismatch: return "GenerativeMismatch";
    case ErrorKind::StackDomainsOverlap: return "StackDomainsOverlap";
    case ErrorKind::NotErasable: return "NotErasable";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Unsupported: return "Unsupported";
  }
  return "Unknown";
}

/// Every failure in the library is reported through this exception.
///
/// `rule` names the typing rule (or translation clause) being attempted,
/// `path` is the child-index path from the root term to the offending
/// subterm and `stack` is a rendering of the context stack at that point.
/// The last three are empty when they do not apply.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, std::string rule = {},
        std::vector<unsigned> path = {}, std::string stack = {})
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message),
        rule_(std::move(rule)),
        path_(std::move(path)),
        stack_(std::move(stack)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& rule() const noexcept { return rule_; }
  const std::vector<unsigned>& path() const noexcept { return path_; }
  const std::string& stack() const noexcept { return stack_; }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::string rule_;
  std::vector<unsigned> path_;
  std::string stack_;
};

}  // namespace cmtt
