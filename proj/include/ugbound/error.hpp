#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ugbound {

enum class ErrorKind {
  NonBijectivePermutation,
  PermutationLength,
  NonPositiveWeight,
  VertexOutOfRange,
  SelfLoop,
  DuplicateEdge,
  TooFewLabels,
  TooManyEdges,
  Parse,
  UnsupportedVersion,
  DimensionMismatch,
  InvariantViolation,
  RangeViolation,
  BudgetExceeded,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonBijectivePermutation: return "non-bijective permutation";
    case ErrorKind::PermutationLength: return "permutation length";
    case ErrorKind::NonPositiveWeight: return "nonpositive weight";
    case ErrorKind::VertexOutOfRange: return "vertex out of range";
    case ErrorKind::SelfLoop: return "self-loop";
    case ErrorKind::DuplicateEdge: return "duplicate edge";
    case ErrorKind::TooFewLabels: return "fewer than two labels";
    case ErrorKind::TooManyEdges: return "too many edges";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::UnsupportedVersion: return "unsupported version";
    case ErrorKind::DimensionMismatch: return "dimension mismatch";
    case ErrorKind::InvariantViolation: return "invariant violation";
    case ErrorKind::RangeViolation: return "range violation";
    case ErrorKind::BudgetExceeded: return "enumeration budget exceeded";
  }
  return "unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

/// Instance text could not be parsed. line() is 1-based.
class ParseError : public Error {
public:
  ParseError(std::size_t line, const std::string& detail)
      : Error(ErrorKind::Parse, "line " + std::to_string(line) + ": " + detail),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

}  // namespace ugbound
