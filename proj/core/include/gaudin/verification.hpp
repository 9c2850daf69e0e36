#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gaudin/dynamics.hpp"
#include "gaudin/lambda_solver.hpp"
#include "gaudin/model.hpp"

/// Oracle-equivalence checks. Each returns the worst observed deviation
/// next to the tolerance it was judged against.
namespace gaudin::verify {

struct CheckResult {
  std::string name;
  bool passed = false;
  bool skipped = false;
  double worst = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;
  std::string detail;
};

std::string describe(const CheckResult& r);

/// Every sector 0..N of the model.
std::vector<SectorSolution> solve_all_sectors(const GaudinModel& model,
                                              const ContinuationConfig& cfg = {});

/// Det J, the Izergin form and the permutation sum on random complex
/// rapidities, pairwise relative agreement.
CheckResult partition_triple(std::size_t instances, std::size_t max_n, std::size_t max_m,
                             std::uint64_t seed, double tol = 1e-9);

/// Residue of Det J as one rapidity approaches an occupied level against
/// the reduced overlap.
CheckResult recursion_residue(std::size_t instances, std::uint64_t seed, double tol = 1e-5);

/// C(N, M) distinct states per sector, residual and sum rule.
CheckResult solver_completeness(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                                double residual_tol = 1e-11, double sum_rule_factor = 1e-9);

/// Shifted states solve the Mu-axis system and keep their charges.
CheckResult representation_transform(const GaudinModel& model,
                                     const std::vector<SectorSolution>& sectors,
                                     double residual_tol = 1e-11, double charge_tol = 1e-12);

/// Solver charges against simultaneous diagonalization, one to one.
CheckResult spectrum_equivalence(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                                 double tol = 1e-8);

/// Det K and Det G against inner products of explicit Bethe vectors,
/// including random states that solve nothing; orthogonality of distinct
/// eigenstates relative to the Cauchy-Schwarz bound.
CheckResult scalar_products(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                            std::size_t states_per_sector, std::uint64_t seed, double tol = 1e-9,
                            double orthogonality_tol = 1e-8);

/// S^+ and S^z determinant form factors against explicit matrix elements on
/// every site for random eigenstate pairs.
CheckResult form_factors(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                         std::size_t pairs_per_sector, std::uint64_t seed, double tol = 1e-9);

struct SignDetermination {
  int sign = 0;
  double error_plus = 0.0;   // worst relative error with c_j = +1/(lambda_j - eps_i)
  double error_minus = 0.0;  // worst relative error with c_j = -1/(lambda_j - eps_i)
  std::string report;
};

/// Evaluates both signs of the S^z expansion against the one-spin closed
/// form and two-spin explicit vectors.
SignDetermination determine_sz_sign();

/// Coherence factor from the spectral table against direct evolution, plus
/// the t = 0 value and completeness sums.
CheckResult central_spin_dynamics(const CentralSpinParams& params, std::span<const double> times,
                                  double tol = 1e-6, double t0_tol = 1e-8,
                                  double completeness_tol = 1e-8);

/// Analytic quadratic Jacobian against central differences with step 1e-6.
CheckResult jacobian_finite_difference(const GaudinModel& model, std::size_t samples,
                                       std::uint64_t seed, double tol = 1e-5);

/// Lambda -> rapidities -> Lambda for every solved state.
CheckResult rapidity_round_trip(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                                double tol = 1e-7);

/// Levels (sorted, span 1) with spacing at least 0.3 / N.
std::vector<double> random_levels(std::size_t n, std::uint64_t seed);

}  // namespace gaudin::verify
