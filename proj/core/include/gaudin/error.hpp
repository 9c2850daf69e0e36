#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gaudin {

enum class ErrorCode {
  InvalidArgument,
  DuplicateEpsilon,
  ZeroCoupling,
  NonFinite,
  LengthMismatch,
  InvalidOccupation,
  NoConvergence,
  NotAnEigenstate,
  SectorInference,
  RapidityOnLevel,
  NonRealLambda,
  CoincidingRapidities,
  IllConditioned,
  PolishDiverged,
  PoleEvaluation,
  TooLarge,
  AxisMismatch,
  SiteOutOfRange,
  RapiditiesRequired,
  ZeroOverlap,
  DegenerateGeneric,
  ZeroField,
  DegenerateCouplings,
  IncompleteSector,
  EmptyTable,
  ParseError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised by the continuation solver; carries the last coupling at which a
/// converged state was held.
class NoConvergence : public Error {
 public:
  NoConvergence(double last_g, const std::string& what);

  double last_g() const noexcept { return last_g_; }

 private:
  double last_g_;
};

}  // namespace gaudin
