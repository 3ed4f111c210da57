#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace beq {

enum class ErrorKind {
  OutOfBounds,
  PredicateNotTotal,
  InvalidBound,
  InvalidCategorization,
  RevisionMismatch,
  WouldViolate,
  StillInconsistent,
  GammaOutOfRange,
  UnknownElement,
  InvalidCut,
  PredicateMisclassifies,
  NotSeparable,
  MarginTooSmall,
  DegenerateCut,
  NoFlipObserved,
  InvalidConfig,
  DimensionMismatch,
  MissingLabel,
  NonLinearEvaluator,
  NoCandidateGap,
  GridTooLarge,
  Overflow,
  ParseError,
  NotInconsistent,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfBounds: return "OutOfBounds";
    case ErrorKind::PredicateNotTotal: return "PredicateNotTotal";
    case ErrorKind::InvalidBound: return "InvalidBound";
    case ErrorKind::InvalidCategorization: return "InvalidCategorization";
    case ErrorKind::RevisionMismatch: return "RevisionMismatch";
    case ErrorKind::WouldViolate: return "WouldViolate";
    case ErrorKind::StillInconsistent: return "StillInconsistent";
    case ErrorKind::GammaOutOfRange: return "GammaOutOfRange";
    case ErrorKind::UnknownElement: return "UnknownElement";
    case ErrorKind::InvalidCut: return "InvalidCut";
    case ErrorKind::PredicateMisclassifies: return "PredicateMisclassifies";
    case ErrorKind::NotSeparable: return "NotSeparable";
    case ErrorKind::MarginTooSmall: return "MarginTooSmall";
    case ErrorKind::DegenerateCut: return "DegenerateCut";
    case ErrorKind::NoFlipObserved: return "NoFlipObserved";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::MissingLabel: return "MissingLabel";
    case ErrorKind::NonLinearEvaluator: return "NonLinearEvaluator";
    case ErrorKind::NoCandidateGap: return "NoCandidateGap";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::NotInconsistent: return "NotInconsistent";
  }
  return "Unknown";
}

/// Base exception for every failure raised by the library. `kind()` is the
/// stable, machine-checkable part; `what()` carries a human diagnostic.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind), message_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Diagnostic without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

}  // namespace beq
