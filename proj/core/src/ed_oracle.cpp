#include "gaudin/ed_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "gaudin/error.hpp"

namespace gaudin::ed {

namespace {

double sz_of(std::uint64_t state, std::size_t site) {
  return ((state >> site) & 1U) ? 0.5 : -0.5;
}

std::size_t dimension(std::size_t num_spins) { return std::size_t{1} << num_spins; }

// Nonzero entries of R_i acting on one basis state.
template <class Emit>
void charge_column(const GaudinModel& model, std::size_t site, std::uint64_t state, Emit&& emit) {
  const double g = model.coupling();
  const double szi = sz_of(state, site);
  double diag = -2.0 * szi / g;
  for (std::size_t j = 0; j < model.size(); ++j) {
    if (j == site) continue;
    const double inv = 1.0 / (model.epsilon(site) - model.epsilon(j));
    diag += 2.0 * szi * sz_of(state, j) * inv;
    if (((state >> site) & 1U) != ((state >> j) & 1U)) {
      // S^+_i S^-_j + S^-_i S^+_j flips both spins with unit amplitude
      emit(state ^ ((std::uint64_t{1} << site) | (std::uint64_t{1} << j)), inv);
    }
  }
  emit(state, diag);
}

}  // namespace

void require_oracle_size(std::size_t num_spins) {
  if (num_spins > kMaxSpins) {
    throw Error(ErrorCode::TooLarge, "exact diagonalization is capped at " +
                                         std::to_string(kMaxSpins) + " spins, got " +
                                         std::to_string(num_spins));
  }
}

SpinOperators build_spin_ops(std::size_t num_spins) {
  require_oracle_size(num_spins);
  const auto dim = static_cast<Eigen::Index>(dimension(num_spins));
  SpinOperators ops;
  for (std::size_t k = 0; k < num_spins; ++k) {
    OperatorMatrix plus = OperatorMatrix::Zero(dim, dim);
    OperatorMatrix z = OperatorMatrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
      const auto state = static_cast<std::uint64_t>(s);
      z(s, s) = sz_of(state, k);
      if (!((state >> k) & 1U)) plus(static_cast<Eigen::Index>(state | (std::uint64_t{1} << k)), s) = 1.0;
    }
    ops.minus.push_back(plus.transpose());
    ops.plus.push_back(std::move(plus));
    ops.z.push_back(std::move(z));
  }
  return ops;
}

OperatorMatrix build_charge(const GaudinModel& model, std::size_t site) {
  require_oracle_size(model.size());
  if (site >= model.size()) throw Error(ErrorCode::SiteOutOfRange, "site " + std::to_string(site));
  const auto dim = static_cast<Eigen::Index>(dimension(model.size()));
  OperatorMatrix r = OperatorMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    charge_column(model, site, static_cast<std::uint64_t>(s), [&](std::uint64_t row, double v) {
      r(static_cast<Eigen::Index>(row), s) += v;
    });
  }
  return r;
}

OperatorMatrix build_hamiltonian(const GaudinModel& model, std::span<const double> eta) {
  require_oracle_size(model.size());
  if (eta.size() != model.size()) throw Error(ErrorCode::LengthMismatch, "eta length differs from N");
  const auto dim = static_cast<Eigen::Index>(dimension(model.size()));
  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (eta[i] == 0.0) continue;
    for (Eigen::Index s = 0; s < dim; ++s) {
      charge_column(model, i, static_cast<std::uint64_t>(s), [&](std::uint64_t row, double v) {
        h(static_cast<Eigen::Index>(row), s) += eta[i] * v;
      });
    }
  }
  return h;
}

OperatorMatrix central_spin_hamiltonian(double field, std::span<const double> couplings) {
  const std::size_t n = couplings.size() + 1;
  require_oracle_size(n);
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  OperatorMatrix h = OperatorMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    const auto state = static_cast<std::uint64_t>(s);
    double diag = field * sz_of(state, 0);
    for (std::size_t j = 1; j < n; ++j) {
      const double a = couplings[j - 1];
      diag += a * sz_of(state, 0) * sz_of(state, j);
      if ((state & 1U) != ((state >> j) & 1U)) {
        const auto flipped = static_cast<Eigen::Index>(state ^ (1U | (std::uint64_t{1} << j)));
        h(flipped, s) += 0.5 * a;
      }
    }
    h(s, s) += diag;
  }
  return h;
}

StateVector basis_state(const BasisOccupation& occ) {
  require_oracle_size(occ.num_sites());
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(dimension(occ.num_sites())));
  v[static_cast<Eigen::Index>(occ.mask())] = 1.0;
  return v;
}

StateVector apply_splus(const StateVector& v, std::size_t site) {
  StateVector out = StateVector::Zero(v.size());
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    if (!((static_cast<std::uint64_t>(s) >> site) & 1U)) {
      out[s | (Eigen::Index{1} << site)] += v[s];
    }
  }
  return out;
}

StateVector apply_sminus(const StateVector& v, std::size_t site) {
  StateVector out = StateVector::Zero(v.size());
  for (Eigen::Index s = 0; s < v.size(); ++s) {
    if ((static_cast<std::uint64_t>(s) >> site) & 1U) {
      out[s & ~(Eigen::Index{1} << site)] += v[s];
    }
  }
  return out;
}

StateVector apply_sz(const StateVector& v, std::size_t site) {
  StateVector out(v.size());
  for (Eigen::Index s = 0; s < v.size(); ++s) out[s] = sz_of(static_cast<std::uint64_t>(s), site) * v[s];
  return out;
}

StateVector build_bethe_vector(const GaudinModel& model, const RapiditySet& rap) {
  const std::size_t n = model.size();
  require_oracle_size(n);
  const double guard = 1e-12 * std::max(model.span(), 1.0);
  const auto dim = static_cast<Eigen::Index>(dimension(n));
  StateVector v = StateVector::Zero(dim);
  v[rap.axis == Axis::Lambda ? 0 : dim - 1] = 1.0;
  for (const cplx& u : rap.values) {
    StateVector next = StateVector::Zero(dim);
    for (std::size_t i = 0; i < n; ++i) {
      const cplx d = u - model.epsilon(i);
      if (std::abs(d) <= guard) throw Error(ErrorCode::RapidityOnLevel, "rapidity on level");
      next += (rap.axis == Axis::Lambda ? apply_splus(v, i) : apply_sminus(v, i)) / d;
    }
    v = std::move(next);
  }
  return v;
}

cplx inner(const StateVector& a, const StateVector& b) { return a.dot(b); }

std::vector<std::uint32_t> sector_basis(std::size_t num_spins, std::size_t m) {
  require_oracle_size(num_spins);
  std::vector<std::uint32_t> out;
  for (std::uint32_t s = 0; s < (std::uint32_t{1} << num_spins); ++s) {
    if (static_cast<std::size_t>(std::popcount(s)) == m) out.push_back(s);
  }
  return out;
}

Eigen::MatrixXd sector_charge(const GaudinModel& model, std::size_t site,
                              std::span<const std::uint32_t> basis) {
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    charge_column(model, site, basis[static_cast<std::size_t>(col)], [&](std::uint64_t row_state, double v) {
      const auto it = std::lower_bound(basis.begin(), basis.end(), static_cast<std::uint32_t>(row_state));
      r(static_cast<Eigen::Index>(it - basis.begin()), col) += v;
    });
  }
  return r;
}

StateVector SectorSpectrum::full_vector(std::size_t k, std::size_t num_spins) const {
  StateVector v = StateVector::Zero(static_cast<Eigen::Index>(dimension(num_spins)));
  for (std::size_t b = 0; b < basis.size(); ++b) {
    v[static_cast<Eigen::Index>(basis[b])] = vectors(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k));
  }
  return v;
}

std::vector<SectorSpectrum> spectrum_by_sector(const GaudinModel& model, std::uint64_t seed) {
  const std::size_t n = model.size();
  require_oracle_size(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.5, 1.5);

  std::vector<SectorSpectrum> out;
  for (std::size_t m = 0; m <= n; ++m) {
    SectorSpectrum sector;
    sector.sector_m = m;
    sector.basis = sector_basis(n, m);
    std::vector<Eigen::MatrixXd> charges;
    for (std::size_t i = 0; i < n; ++i) charges.push_back(sector_charge(model, i, sector.basis));

    bool resolved = false;
    for (int attempt = 0; attempt < 8 && !resolved; ++attempt) {
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(charges[0].rows(), charges[0].cols());
      for (std::size_t i = 0; i < n; ++i) h += uniform(rng) * charges[i];
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
      const Eigen::VectorXd& w = solver.eigenvalues();
      const double scale = std::max(1.0, w.cwiseAbs().maxCoeff());
      resolved = true;
      for (Eigen::Index k = 1; k < w.size(); ++k) {
        if (w[k] - w[k - 1] < 1e-9 * scale) resolved = false;
      }
      if (resolved) sector.vectors = solver.eigenvectors();
    }
    if (!resolved) {
      throw Error(ErrorCode::DegenerateGeneric,
                  "generic Hamiltonian stays degenerate in sector " + std::to_string(m));
    }
    for (Eigen::Index k = 0; k < sector.vectors.cols(); ++k) {
      ChargeEigenvalues r;
      r.r.resize(n);
      const Eigen::VectorXd v = sector.vectors.col(k);
      for (std::size_t i = 0; i < n; ++i) r.r[i] = v.dot(charges[i] * v);
      sector.charges.push_back(std::move(r));
    }
    out.push_back(std::move(sector));
  }
  return out;
}

Matching match_charges(const std::vector<ChargeEigenvalues>& candidates,
                       const std::vector<ChargeEigenvalues>& reference) {
  Matching out;
  std::vector<bool> used(reference.size(), false);
  for (const ChargeEigenvalues& c : candidates) {
    std::size_t best = reference.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < reference.size(); ++k) {
      if (used[k]) continue;
      double d = 0.0;
      for (std::size_t i = 0; i < c.r.size(); ++i) d = std::max(d, std::abs(c.r[i] - reference[k].r[i]));
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    if (best == reference.size()) {
      throw Error(ErrorCode::InvalidArgument, "more candidates than reference states");
    }
    used[best] = true;
    out.index.push_back(best);
    out.worst = std::max(out.worst, best_d);
    if (best_d > 1e-4) out.ambiguous = true;
  }
  return out;
}

std::vector<cplx> evolve_expectation(const OperatorMatrix& hamiltonian, const StateVector& psi0,
                                     const OperatorMatrix& op, std::span<const double> times) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(hamiltonian);
  const Eigen::MatrixXcd v = solver.eigenvectors().cast<cplx>();
  const Eigen::VectorXcd coeff = v.adjoint() * psi0;
  const Eigen::MatrixXcd op_eigen = v.adjoint() * op.cast<cplx>() * v;
  std::vector<cplx> out;
  out.reserve(times.size());
  for (double t : times) {
    Eigen::VectorXcd c(coeff.size());
    for (Eigen::Index k = 0; k < coeff.size(); ++k) {
      c[k] = coeff[k] * std::exp(cplx(0.0, -solver.eigenvalues()[k] * t));
    }
    out.push_back(c.dot(op_eigen * c));
  }
  return out;
}

}  // namespace gaudin::ed
