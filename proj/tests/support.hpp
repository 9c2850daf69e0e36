#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gaudin/ed_oracle.hpp"
#include "gaudin/lambda_solver.hpp"
#include "gaudin/model.hpp"
#include "gaudin/rapidity.hpp"

namespace testing {

using gaudin::cplx;

inline double rel_err(cplx a, cplx b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double inf_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  return worst;
}

// Laplace expansion along the first row.
template <class Matrix>
typename Matrix::Scalar cofactor_det(const Matrix& m) {
  using Scalar = typename Matrix::Scalar;
  const Eigen::Index n = m.rows();
  if (n == 0) return Scalar(1);
  if (n == 1) return m(0, 0);
  Scalar total(0);
  for (Eigen::Index c = 0; c < n; ++c) {
    Matrix minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      for (Eigen::Index k = 0, kk = 0; k < n; ++k) {
        if (k != c) minor(r - 1, kk++) = m(r, k);
      }
    }
    const Scalar term = m(0, c) * cofactor_det(minor);
    total += (c % 2 == 0) ? term : -term;
  }
  return total;
}

inline std::vector<double> spread_levels(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  std::vector<double> eps(n);
  for (std::size_t i = 0; i < n; ++i) eps[i] = static_cast<double>(i) + jitter(rng);
  const double lo = eps.front();
  const double span = eps.back() - lo;
  for (double& e : eps) e = (e - lo) / std::max(span, 1.0);
  return eps;
}

// Single rapidity on two levels: 1/(e0 - x) + 1/(e1 - x) = 2/g, a quadratic.
inline std::vector<double> two_level_roots(double e0, double e1, double g) {
  const double a = 2.0 / g;
  const double b = 2.0 - a * (e0 + e1);
  const double c = a * e0 * e1 - (e0 + e1);
  const double disc = std::sqrt(b * b - 4.0 * a * c);
  return {(-b - disc) / (2.0 * a), (-b + disc) / (2.0 * a)};
}

// Bethe vector built by applying B(u) = sum_i S^+_i/(u - eps_i) one rapidity
// at a time on the all-down state, without the ed_oracle helpers.
inline gaudin::ed::StateVector apply_creation(const gaudin::GaudinModel& model,
                                             std::span<const cplx> rapidities) {
  const std::size_t n = model.size();
  gaudin::ed::StateVector v = gaudin::ed::StateVector::Zero(Eigen::Index(1) << n);
  v(0) = 1.0;
  for (cplx u : rapidities) {
    gaudin::ed::StateVector next = gaudin::ed::StateVector::Zero(v.size());
    for (Eigen::Index s = 0; s < v.size(); ++s) {
      if (v(s) == 0.0) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (!(s >> i & 1)) next(s | (Eigen::Index(1) << i)) += v(s) / (u - model.epsilon(i));
      }
    }
    v = std::move(next);
  }
  return v;
}

inline gaudin::SectorSolution solved_sector(const gaudin::GaudinModel& model, std::size_t m) {
  return gaudin::solve_all_in_sector(model, m);
}

}  // namespace testing
