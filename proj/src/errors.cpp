#include "svarwb/errors.hpp"

namespace svarwb {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::SingularA0: return "SingularA0";
    case ErrorCode::NonStationary: return "NonStationary";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::RankDeficientR: return "RankDeficientR";
    case ErrorCode::InadmissibleTransform: return "InadmissibleTransform";
    case ErrorCode::NormalizationUndefined: return "NormalizationUndefined";
    case ErrorCode::RecursiveSchemeUnavailable: return "RecursiveSchemeUnavailable";
    case ErrorCode::SolverBudgetExhausted: return "SolverBudgetExhausted";
    case ErrorCode::NotSquareSystem: return "NotSquareSystem";
    case ErrorCode::RecursivePatternViolated: return "RecursivePatternViolated";
    case ErrorCode::DegenerateNullSpace: return "DegenerateNullSpace";
    case ErrorCode::OrderingNotFound: return "OrderingNotFound";
    case ErrorCode::InsufficientObservations: return "InsufficientObservations";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::AllDrawsInadmissible: return "AllDrawsInadmissible";
    case ErrorCode::EmptyRetention: return "EmptyRetention";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace svarwb
