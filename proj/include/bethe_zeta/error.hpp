#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bethe_zeta {

/// Short decimal rendering that keeps tiny values readable.
inline std::string fmt(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

enum class ErrorKind {
  InvalidArgument,
  DisconnectedGraph,
  SelfLoop,
  DuplicateEdge,
  LimitExceeded,
  NumericalIntegrityError,
  NonPositiveTemperature,
  NumericalOverflow,
  NotConverged,
  SingularHessian,
  LeftDomain,
  OutOfDomain,
  SingularPair,
  NumericalInstability,
  DegenerateFixedPoint,
  PossiblyIncompleteEnumeration,
  ContinuationLost,
  TooLarge,
  SchemaError,
  IoError,
  UnknownGenerator,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorKind::SelfLoop: return "SelfLoop";
    case ErrorKind::DuplicateEdge: return "DuplicateEdge";
    case ErrorKind::LimitExceeded: return "LimitExceeded";
    case ErrorKind::NumericalIntegrityError: return "NumericalIntegrityError";
    case ErrorKind::NonPositiveTemperature: return "NonPositiveTemperature";
    case ErrorKind::NumericalOverflow: return "NumericalOverflow";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::SingularHessian: return "SingularHessian";
    case ErrorKind::LeftDomain: return "LeftDomain";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::SingularPair: return "SingularPair";
    case ErrorKind::NumericalInstability: return "NumericalInstability";
    case ErrorKind::DegenerateFixedPoint: return "DegenerateFixedPoint";
    case ErrorKind::PossiblyIncompleteEnumeration: return "PossiblyIncompleteEnumeration";
    case ErrorKind::ContinuationLost: return "ContinuationLost";
    case ErrorKind::TooLarge: return "TooLarge";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnknownGenerator: return "UnknownGenerator";
  }
  return "Unknown";
}

/// Library error. Carries a machine-readable kind and the name of the
/// operation that raised it so front ends can report both.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string operation, const std::string& detail)
      : std::runtime_error(std::string(operation) + ": " + std::string(to_string(kind)) +
                           (detail.empty() ? "" : " (" + detail + ")")),
        kind_(kind),
        operation_(std::move(operation)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& operation() const noexcept { return operation_; }

 private:
  ErrorKind kind_;
  std::string operation_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string operation, const std::string& detail = {}) {
  throw Error(kind, std::move(operation), detail);
}

}  // namespace bethe_zeta
