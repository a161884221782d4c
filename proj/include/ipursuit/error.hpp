#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ipursuit {

enum class ErrorCode {
  EmptyMatrix,
  NonFinite,
  DimensionMismatch,
  InvalidDim,
  InvalidDims,
  NotOrthogonal,
  RankDeficient,
  ZeroCoefficient,
  IndexOutOfRange,
  TooLarge,
  Infeasible,
  ShapeMismatch,
  IsolatedNode,
  InvalidK,
  RankTooLow,
  DegeneratePoint,
  TooFewValues,
  LengthMismatch,
  MissingLabels,
  NotInSpan,
  DomainError,
  ParseError,
  EmptyFile,
  ZeroRow,
  IoError,
  InvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; `code()` identifies the failure and
// `index()` carries the offending node/point/line where one applies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, std::ptrdiff_t index = -1)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), index_(index) {}

  ErrorCode code() const noexcept { return code_; }
  std::ptrdiff_t index() const noexcept { return index_; }

 private:
  ErrorCode code_;
  std::ptrdiff_t index_;
};

}  // namespace ipursuit
