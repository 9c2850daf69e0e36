#include "gaudin/error.hpp"

namespace gaudin {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DuplicateEpsilon: return "DuplicateEpsilon";
    case ErrorCode::ZeroCoupling: return "ZeroCoupling";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::InvalidOccupation: return "InvalidOccupation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotAnEigenstate: return "NotAnEigenstate";
    case ErrorCode::SectorInference: return "SectorInference";
    case ErrorCode::RapidityOnLevel: return "RapidityOnLevel";
    case ErrorCode::NonRealLambda: return "NonRealLambda";
    case ErrorCode::CoincidingRapidities: return "CoincidingRapidities";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::PolishDiverged: return "PolishDiverged";
    case ErrorCode::PoleEvaluation: return "PoleEvaluation";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::AxisMismatch: return "AxisMismatch";
    case ErrorCode::SiteOutOfRange: return "SiteOutOfRange";
    case ErrorCode::RapiditiesRequired: return "RapiditiesRequired";
    case ErrorCode::ZeroOverlap: return "ZeroOverlap";
    case ErrorCode::DegenerateGeneric: return "DegenerateGeneric";
    case ErrorCode::ZeroField: return "ZeroField";
    case ErrorCode::DegenerateCouplings: return "DegenerateCouplings";
    case ErrorCode::IncompleteSector: return "IncompleteSector";
    case ErrorCode::EmptyTable: return "EmptyTable";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

NoConvergence::NoConvergence(double last_g, const std::string& what)
    : Error(ErrorCode::NoConvergence, what), last_g_(last_g) {}

}  // namespace gaudin
