#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace gaudin {

/// Spin-1/2 rational Gaudin magnet: N distinct levels eps_i and a coupling g.
///
/// The model is immutable after construction. The level sums
/// sum_{c != a} 1/(eps_a - eps_c), which appear on the diagonal of every
/// determinant in this library, are cached here.
class GaudinModel {
 public:
  /// Validates the levels and the coupling. Throws DuplicateEpsilon when two
  /// levels are closer than 1e-10 of the level span, ZeroCoupling for g == 0,
  /// NonFinite for NaN/Inf input and InvalidArgument for an empty level list.
  GaudinModel(std::vector<double> epsilons, double coupling);

  std::size_t size() const noexcept { return epsilons_.size(); }
  std::span<const double> epsilons() const noexcept { return epsilons_; }
  double epsilon(std::size_t i) const { return epsilons_.at(i); }
  double coupling() const noexcept { return coupling_; }

  /// Omega = sum_i 2|S_i|; equal to N for spin-1/2.
  std::size_t omega() const noexcept { return omega_; }

  double span() const noexcept { return span_; }
  double min_spacing() const noexcept { return min_spacing_; }

  /// sum_{c != a} 1/(eps_a - eps_c)
  double level_sum(std::size_t a) const { return level_sums_.at(a); }

 private:
  std::vector<double> epsilons_;
  double coupling_;
  std::size_t omega_;
  double span_;
  double min_spacing_;
  std::vector<double> level_sums_;
};

GaudinModel new_model(std::vector<double> epsilons, double coupling);

/// Strictly increasing list of up-spin site indices; the g = 0 product state
/// prod_k S^+_{i_k} |down...down>.
class BasisOccupation {
 public:
  BasisOccupation() = default;
  /// Throws InvalidOccupation unless `up_sites` is strictly
  /// increasing and inside [0, num_sites).
  BasisOccupation(std::vector<std::size_t> up_sites, std::size_t num_sites);

  static BasisOccupation from_mask(std::uint64_t mask, std::size_t num_sites);

  std::size_t size() const noexcept { return sites_.size(); }
  bool empty() const noexcept { return sites_.empty(); }
  std::size_t num_sites() const noexcept { return num_sites_; }
  std::span<const std::size_t> sites() const noexcept { return sites_; }
  std::size_t operator[](std::size_t k) const { return sites_[k]; }
  bool contains(std::size_t site) const;
  std::uint64_t mask() const;

  /// Down sites of the same product state.
  BasisOccupation complement() const;
  BasisOccupation with(std::size_t site) const;
  BasisOccupation without(std::size_t site) const;

  friend bool operator==(const BasisOccupation&, const BasisOccupation&) = default;

 private:
  std::vector<std::size_t> sites_;
  std::size_t num_sites_ = 0;
};

/// All C(N, M) occupations of sector M in lexicographic order.
std::vector<BasisOccupation> sector_occupations(std::size_t num_sites, std::size_t m);

std::uint64_t binomial(std::size_t n, std::size_t k);

/// Which pseudo-vacuum a Lambda array is built on: all-down (Lambda) or
/// all-up (Mu).
enum class Axis { Lambda, Mu };

std::string_view to_string(Axis axis);

/// Lambda(eps_i) = sum_j 1/(eps_i - rapidity_j) on all N levels.
///
/// `sector_m` is always the number of up spins of the state, whichever axis
/// it is written on: a Lambda-axis state carries M rapidities, a Mu-axis
/// state carries N - M.
struct LambdaState {
  std::vector<double> values;
  Axis axis = Axis::Lambda;
  std::size_t sector_m = 0;
  double g = 0.0;

  std::size_t size() const noexcept { return values.size(); }
  /// Number of rapidities behind the values.
  std::size_t rapidity_count() const noexcept {
    return axis == Axis::Lambda ? sector_m : values.size() - sector_m;
  }
};

struct ChargeEigenvalues {
  std::vector<double> r;
};

/// r_i of the conserved charges R_i for a state in either representation.
ChargeEigenvalues charge_eigenvalues(const GaudinModel& model, const LambdaState& lam);

/// sum_i eta_i r_i; throws LengthMismatch.
double hamiltonian_energy(std::span<const double> eta, const ChargeEigenvalues& r);

}  // namespace gaudin
