#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wahm {

enum class ErrorCode {
  LevelOutOfRange,
  CellOutsideDomain,
  LevelZeroCell,
  NotABsplineSupport,
  InvalidHierarchy,
  NotClustered,
  NotWeaklyAdmissible,
  NotStrictlyAdmissible,
  CellNotInSubdomain,
  MarkedCellNotActive,
  ProbeCellUnavailable,
  DerivativeOrderExceedsDegree,
  SingularMatrix,
  PenaltyTooSmall,
  NonpositiveError,
  EmptyEstimatorMap,
  InvalidArgument,
  UnsupportedDimension,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Exception carrying a machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace wahm
