#pragma once

#include <complex>
#include <span>
#include <vector>

#include "gaudin/model.hpp"

namespace gaudin {

using cplx = std::complex<double>;

/// Rapidities of a Bethe state on the given pseudo-vacuum.
struct RapiditySet {
  std::vector<cplx> values;
  Axis axis = Axis::Lambda;

  std::size_t size() const noexcept { return values.size(); }
};

/// sum_j 1/(level - rapidity_j) at each level, in complex arithmetic.
/// Throws RapidityOnLevel when a rapidity sits within 1e-12 * span of a level.
std::vector<cplx> lambda_at(const GaudinModel& model, std::span<const double> levels,
                            std::span<const cplx> rapidities);

/// Real Lambda array of a conjugate-closed rapidity set. Throws
/// NonRealLambda when an imaginary part exceeds 1e-8 of the largest value.
LambdaState lambda_from_rapidities(const GaudinModel& model, const RapiditySet& rap);

/// F(lambda_i) - sum_{j != i} 1/(lambda_i - lambda_j) for each rapidity.
std::vector<cplx> bethe_residuals(const GaudinModel& model, const RapiditySet& rap);

/// Lowest-weight function F(u) = -sum_k (1/2)/(eps_k - u) +/- 1/g.
cplx lowest_weight(const GaudinModel& model, Axis axis, cplx u);

/// Roots of the polynomial P(u) = prod_j (u - lambda_j) fixed by
/// P'(eps_i) = Lambda_i P(eps_i), Newton-polished on the Bethe equations.
///
/// The rapidity count comes from the sum rule. Throws IllConditioned when
/// the least-squares fit leaves a relative residual above 1e-6 and
/// PolishDiverged when a root moves away during polishing.
RapiditySet extract_rapidities(const GaudinModel& model, const LambdaState& lam);

/// Eigenvalue of the transfer matrix S^2(u) on the Bethe state. Throws
/// PoleEvaluation when u coincides with a level or a rapidity.
cplx tau_eigenvalue(const GaudinModel& model, const RapiditySet& rap, cplx u);

}  // namespace gaudin
