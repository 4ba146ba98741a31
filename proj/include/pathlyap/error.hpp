#pragma once

#include <stdexcept>
#include <string>

namespace pathlyap {

enum class ErrorKind {
  malformed_document,
  unknown_field,
  unknown_symbol,
  empty_label,
  duplicate_node,
  duplicate_symbol,
  unknown_node,
  dimension_mismatch,
  non_symmetric,
  non_finite,
  invalid_argument,
  budget_exceeded,
  cycle_detected,
  verification_failed,
  not_path_complete,
  already_path_complete,
  fresh_symbol_collision,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::malformed_document: return "malformed document";
    case ErrorKind::unknown_field: return "unknown field";
    case ErrorKind::unknown_symbol: return "unknown symbol";
    case ErrorKind::empty_label: return "empty label";
    case ErrorKind::duplicate_node: return "duplicate node";
    case ErrorKind::duplicate_symbol: return "duplicate symbol";
    case ErrorKind::unknown_node: return "unknown node";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::non_symmetric: return "non-symmetric form";
    case ErrorKind::non_finite: return "non-finite entry";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::budget_exceeded: return "budget exceeded";
    case ErrorKind::cycle_detected: return "cycle detected";
    case ErrorKind::verification_failed: return "verification failed";
    case ErrorKind::not_path_complete: return "graph is not path-complete";
    case ErrorKind::already_path_complete: return "graph is path-complete";
    case ErrorKind::fresh_symbol_collision: return "fresh symbol collision";
  }
  return "error";
}

/// Every failure raised by the library carries a kind so callers (and the CLI
/// exit-code table) can tell diagnostics apart without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace pathlyap
