#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gaudin/model.hpp"
#include "gaudin/rapidity.hpp"

/// Brute-force reference in the 2^N product basis. Bit k of a basis index
/// is spin k (0 = down, 1 = up), spin 0 least significant.
namespace gaudin::ed {

inline constexpr std::size_t kMaxSpins = 12;

using StateVector = Eigen::VectorXcd;
/// Every operator built here is real in the S^z basis.
using OperatorMatrix = Eigen::MatrixXd;

/// Throws TooLarge above kMaxSpins.
void require_oracle_size(std::size_t num_spins);

struct SpinOperators {
  std::vector<OperatorMatrix> plus;
  std::vector<OperatorMatrix> minus;
  std::vector<OperatorMatrix> z;
};

/// Dense S^+_i, S^-_i, S^z_i. Memory grows as 3 N 4^N doubles; intended for
/// small N even though the cap is kMaxSpins.
SpinOperators build_spin_ops(std::size_t num_spins);

/// R_i = -2 S^z_i/g + sum_{j != i} 2 S_i.S_j/(eps_i - eps_j).
OperatorMatrix build_charge(const GaudinModel& model, std::size_t site);

/// sum_i eta_i R_i.
OperatorMatrix build_hamiltonian(const GaudinModel& model, std::span<const double> eta);

/// B S^z_0 + sum_j A_j S_0.S_j on 1 + A.size() spins (central spin is 0).
OperatorMatrix central_spin_hamiltonian(double field, std::span<const double> couplings);

StateVector basis_state(const BasisOccupation& occ);

StateVector apply_splus(const StateVector& v, std::size_t site);
StateVector apply_sminus(const StateVector& v, std::size_t site);
StateVector apply_sz(const StateVector& v, std::size_t site);

/// prod_j B(lambda_j)|down...down> on the Lambda axis, prod_j C(mu_j)|up...up>
/// with C(u) = sum_i S^-_i/(u - eps_i) on the Mu axis. Throws RapidityOnLevel.
StateVector build_bethe_vector(const GaudinModel& model, const RapiditySet& rap);

/// <a|b> with the bra conjugated.
cplx inner(const StateVector& a, const StateVector& b);

/// Basis indices with popcount M, ascending.
std::vector<std::uint32_t> sector_basis(std::size_t num_spins, std::size_t m);

/// R_i restricted to a fixed-magnetization basis.
Eigen::MatrixXd sector_charge(const GaudinModel& model, std::size_t site,
                              std::span<const std::uint32_t> basis);

struct SectorSpectrum {
  std::size_t sector_m = 0;
  std::vector<std::uint32_t> basis;
  /// Orthonormal joint eigenvectors as columns, in `basis` coordinates.
  Eigen::MatrixXd vectors;
  std::vector<ChargeEigenvalues> charges;

  /// Eigenvector k embedded in the full 2^N space.
  StateVector full_vector(std::size_t k, std::size_t num_spins) const;
};

/// Diagonalizes sum_i eta_i R_i per sector with a seeded generic eta and
/// reads r_i = <v|R_i|v>. Redraws eta a few times before throwing
/// DegenerateGeneric when a gap below 1e-9 persists.
std::vector<SectorSpectrum> spectrum_by_sector(const GaudinModel& model,
                                               std::uint64_t seed = 20240531);

struct Matching {
  /// reference index matched to each candidate
  std::vector<std::size_t> index;
  double worst = 0.0;
  /// some best match is farther than 1e-4
  bool ambiguous = false;
};

/// Greedy nearest-neighbour matching of r-vectors in the infinity norm.
Matching match_charges(const std::vector<ChargeEigenvalues>& candidates,
                       const std::vector<ChargeEigenvalues>& reference);

/// <psi(t)|op|psi(t)> with psi(t) = exp(-i H t) psi0, by full diagonalization.
std::vector<cplx> evolve_expectation(const OperatorMatrix& hamiltonian, const StateVector& psi0,
                                     const OperatorMatrix& op, std::span<const double> times);

}  // namespace gaudin::ed
