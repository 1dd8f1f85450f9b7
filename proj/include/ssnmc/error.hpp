#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ssnmc {

enum class ErrorKind {
  SlotKindMismatch,
  SlotOutOfRange,
  DimensionMismatch,
  DuplicateSlots,
  NonFiniteComponent,
  OutOfChart,
  OrderUnsupported,
  StencilOutOfChart,
  SingularMetric,
  JetUnavailable,
  DimensionTooSmall,
  DegeneratePlane,
  HypothesisViolated,
  ConfigError,
  UnknownManifold,
  InvalidParams,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SlotKindMismatch: return "SlotKindMismatch";
    case ErrorKind::SlotOutOfRange: return "SlotOutOfRange";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DuplicateSlots: return "DuplicateSlots";
    case ErrorKind::NonFiniteComponent: return "NonFiniteComponent";
    case ErrorKind::OutOfChart: return "OutOfChart";
    case ErrorKind::OrderUnsupported: return "OrderUnsupported";
    case ErrorKind::StencilOutOfChart: return "StencilOutOfChart";
    case ErrorKind::SingularMetric: return "SingularMetric";
    case ErrorKind::JetUnavailable: return "JetUnavailable";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::DegeneratePlane: return "DegeneratePlane";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::UnknownManifold: return "UnknownManifold";
    case ErrorKind::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the verification suite in particular) can record it per check.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace ssnmc
