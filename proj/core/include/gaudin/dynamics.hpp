#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "gaudin/lambda_solver.hpp"
#include "gaudin/model.hpp"
#include "gaudin/rapidity.hpp"

namespace gaudin {

/// Central spin in a field B coupled to a bath through A_j, prepared in
/// (alpha|up> + beta|down>) x |bath occupation>.
struct CentralSpinParams {
  double field = 0.0;
  std::vector<double> couplings;
  cplx alpha{1.0, 0.0};
  cplx beta{0.0, 0.0};
  /// Up sites among the bath spins, indexed 0..couplings.size()-1.
  BasisOccupation bath_occupation;

  /// Throws InvalidArgument for zero couplings, mismatched occupation size or
  /// |alpha|^2 + |beta|^2 off 1 by more than 1e-12.
  void validate() const;
};

struct MappedModel {
  GaudinModel model;
  /// H = sum_i eta_i R_i; (1/2, 0, ..., 0) for the central spin.
  std::vector<double> eta;
};

/// g = -1/B, eps_0 = 0, eps_j = -1/A_j, H = R_0/2. Throws ZeroField and
/// DegenerateCouplings.
MappedModel map_to_gaudin(const CentralSpinParams& params);

/// Bath occupation as an occupation of the mapped model (central spin down).
BasisOccupation mapped_occupation(const CentralSpinParams& params);

struct SpectralRow {
  std::size_t n = 0;  // state in sector M + 1
  std::size_t m = 0;  // state in sector M
  cplx amplitude;
  double frequency = 0.0;  // omega_n - omega_m
};

struct SpectralTable {
  std::vector<SpectralRow> rows;
  /// sum_m <occ|lambda_m><mu_m|occ>/<mu_m|lambda_m>, equal to 1 for a complete sector M.
  double completeness_lower = 0.0;
  /// Same over sector M + 1 with the central spin flipped up.
  double completeness_upper = 0.0;
};

/// Amplitudes conj(alpha) beta <up;occ|lambda_n><mu_n|S^+_0|lambda_m><mu_m|occ>
/// / (<mu_n|lambda_n><mu_m|lambda_m>) with frequencies from the charges.
/// Throws IncompleteSector unless both sectors hold C(N, .) states.
SpectralTable build_spectral_table(const CentralSpinParams& params, const MappedModel& mapped,
                                   const SectorSolution& lower, const SectorSolution& upper);

/// Maps, solves both sectors and assembles the table.
SpectralTable central_spin_table(const CentralSpinParams& params,
                                 const ContinuationConfig& cfg = {});

struct FullSampling {};
struct MonteCarloSampling {
  std::size_t count = 0;
  std::uint64_t seed = 0;
};
using Sampling = std::variant<FullSampling, MonteCarloSampling>;

struct TimeSeries {
  std::vector<double> times;
  std::vector<cplx> values;
  /// Monte Carlo standard error per time (empty for exact sums).
  std::vector<double> std_error;
};

/// <psi(t)|S^+_0|psi(t)> on the time grid. Monte Carlo draws rows with
/// probability |amplitude| / sum|amplitude| and averages amplitude/p times
/// the phase; a count covering every row falls back to the exact sum.
/// Throws EmptyTable.
TimeSeries coherence_factor(const SpectralTable& table, std::span<const double> times,
                            const Sampling& sampling = FullSampling{});

/// count evenly spaced points from start to stop inclusive.
std::vector<double> time_grid(double start, double stop, std::size_t count);

/// The same coherence factor from direct evolution of the central-spin
/// Hamiltonian in the full product basis.
std::vector<cplx> coherence_by_exact_evolution(const CentralSpinParams& params,
                                               std::span<const double> times);

}  // namespace gaudin
