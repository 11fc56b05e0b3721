#pragma once

#include <stdexcept>
#include <string>

namespace svarwb {

enum class ErrorCode {
  InvalidArgument,
  SingularA0,
  NonStationary,
  ZeroVariance,
  NotPositiveDefinite,
  IndexOutOfRange,
  RankDeficientR,
  InadmissibleTransform,
  NormalizationUndefined,
  RecursiveSchemeUnavailable,
  SolverBudgetExhausted,
  NotSquareSystem,
  RecursivePatternViolated,
  DegenerateNullSpace,
  OrderingNotFound,
  InsufficientObservations,
  NonPositiveScale,
  AllDrawsInadmissible,
  EmptyRetention,
  ConfigError,
  Infeasible,
  IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace svarwb
