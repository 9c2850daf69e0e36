#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gaudin/model.hpp"

namespace gaudin {

/// Parameters of the g-ladder continuation.
struct ContinuationConfig {
  /// |g| of the first rung. Zero selects 1e-3 * min level spacing.
  double g_start = 0.0;
  /// Ratio between consecutive |g| rungs, in (1, 2].
  double step_factor = 1.5;
  double newton_tol = 1e-12;
  int max_newton_iters = 50;
  /// Consecutive step halvings allowed on one rung before giving up.
  int max_backtracks = 30;

  /// Throws InvalidArgument when a field is outside its documented range.
  void validate() const;
  double first_rung(const GaudinModel& model) const;
};

/// Component j: Lambda_j^2 - sum_{i != j} (Lambda_j - Lambda_i)/(eps_j - eps_i)
/// -/+ (2/g) Lambda_j, with - on the Lambda axis and + on the Mu axis.
/// Evaluated at lam.g.
std::vector<double> quadratic_residual(const GaudinModel& model, const LambdaState& lam);

double residual_inf_norm(const GaudinModel& model, const LambdaState& lam);

/// Analytic Jacobian d residual_j / d Lambda_k at lam.g.
Eigen::MatrixXd quadratic_jacobian(const GaudinModel& model, const LambdaState& lam);

/// Weak-coupling Lambda-axis seed labeled by the g = 0 occupation, built
/// from rapidities sitting at eps_{i_k} - g_small/2.
LambdaState seed_state(const GaudinModel& model, const BasisOccupation& occ, double g_small);

/// Newton iterations on the quadratic system at fixed lam.g. Returns the
/// number of iterations used, or -1 when the tolerance was not reached.
int newton_refine(const GaudinModel& model, LambdaState& lam, double tol, int max_iters);

/// Continues the seed of `occ` from cfg.g_start to model.coupling() on a
/// geometric ladder. Throws NoConvergence with the last rung reached.
LambdaState solve_sector(const GaudinModel& model, const BasisOccupation& occ,
                         const ContinuationConfig& cfg = {});

/// Every state of sector M, indexed like sector_occupations(N, M).
struct SectorSolution {
  std::size_t sector_m = 0;
  std::vector<BasisOccupation> occupations;
  std::vector<LambdaState> states;
  /// Pairs of state indices closer than 1e-6 in the infinity norm.
  std::vector<std::pair<std::size_t, std::size_t>> collisions;
};

/// Solves all C(N, M) occupations of sector M in parallel.
SectorSolution solve_all_in_sector(const GaudinModel& model, std::size_t m,
                                   const ContinuationConfig& cfg = {});

/// Index pairs of states whose Lambda arrays lie within `threshold`.
std::vector<std::pair<std::size_t, std::size_t>> find_collisions(
    const std::vector<LambdaState>& states, double threshold = 1e-6);

/// Lambda^mu = Lambda^lambda - 2/g and back. Throws NotAnEigenstate when the
/// scaled quadratic residual of the input exceeds `tol`.
LambdaState transform_axis(const GaudinModel& model, const LambdaState& lam, double tol = 1e-8);

/// sum_i Lambda_i - 2M/g (Lambda axis) or sum_i Lambda_i + 2(N - M)/g (Mu axis).
double sum_rule_defect(const GaudinModel& model, const LambdaState& lam);

/// Number of rapidities implied by the sum rule. Throws SectorInference when
/// the implied count is off an integer by more than 1e-6.
std::size_t infer_rapidity_count(const GaudinModel& model, std::span<const double> values,
                                 Axis axis);

}  // namespace gaudin
