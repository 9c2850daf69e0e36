#include "gaudin/rapidity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "gaudin/error.hpp"
#include "gaudin/lambda_solver.hpp"

namespace gaudin {

namespace {

double pole_guard(const GaudinModel& model) { return 1e-12 * std::max(model.span(), 1.0); }

double axis_field(const GaudinModel& model, Axis axis) {
  return (axis == Axis::Lambda ? 1.0 : -1.0) / model.coupling();
}

// Bethe residuals plus the magnitude of their largest terms.
struct BetheEval {
  Eigen::VectorXcd value;
  double scaled_inf = 0.0;
};

BetheEval evaluate_bethe(const GaudinModel& model, Axis axis, const Eigen::VectorXcd& rap) {
  const Eigen::Index m = rap.size();
  const double field = axis_field(model, axis);
  BetheEval out;
  out.value.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    cplx f = field;
    double mag = std::abs(field);
    for (double e : model.epsilons()) {
      const cplx t = 0.5 / (e - rap[i]);
      f -= t;
      mag += std::abs(t);
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const cplx t = 1.0 / (rap[i] - rap[j]);
      f -= t;
      mag += std::abs(t);
    }
    out.value[i] = f;
    const double s = std::abs(f) / std::max(mag, 1e-300);
    out.scaled_inf = std::isfinite(s) ? std::max(out.scaled_inf, s)
                                      : std::numeric_limits<double>::infinity();
  }
  return out;
}

Eigen::MatrixXcd bethe_jacobian(const GaudinModel& model, const Eigen::VectorXcd& rap) {
  const Eigen::Index m = rap.size();
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    cplx diag = 0.0;
    for (double e : model.epsilons()) diag -= 0.5 / ((e - rap[i]) * (e - rap[i]));
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == i) continue;
      const cplx d = 1.0 / ((rap[i] - rap[j]) * (rap[i] - rap[j]));
      diag += d;
      jac(i, j) = -d;
    }
    jac(i, i) = diag;
  }
  return jac;
}

// Replace each root by the average with its conjugate partner so the set is
// exactly conjugate-closed.
void symmetrize_conjugates(Eigen::VectorXcd& rap) {
  const Eigen::Index m = rap.size();
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  for (Eigen::Index a = 0; a < m; ++a) {
    if (used[static_cast<std::size_t>(a)]) continue;
    Eigen::Index best = a;
    double best_d = std::abs(rap[a] - std::conj(rap[a]));
    for (Eigen::Index b = a + 1; b < m; ++b) {
      if (used[static_cast<std::size_t>(b)]) continue;
      const double d = std::abs(rap[b] - std::conj(rap[a]));
      if (d < best_d) {
        best_d = d;
        best = b;
      }
    }
    const double tol = 1e-6 * (1.0 + std::abs(rap[a]));
    if (best_d > tol) continue;
    used[static_cast<std::size_t>(a)] = used[static_cast<std::size_t>(best)] = true;
    if (best == a) {
      rap[a] = rap[a].real();
    } else {
      const cplx mean = 0.5 * (rap[a] + std::conj(rap[best]));
      rap[a] = mean;
      rap[best] = std::conj(mean);
    }
  }
}

}  // namespace

std::vector<cplx> lambda_at(const GaudinModel& model, std::span<const double> levels,
                            std::span<const cplx> rapidities) {
  const double guard = pole_guard(model);
  std::vector<cplx> out(levels.size(), cplx{});
  for (std::size_t i = 0; i < levels.size(); ++i) {
    for (const cplx& r : rapidities) {
      const cplx d = levels[i] - r;
      if (std::abs(d) <= guard) {
        throw Error(ErrorCode::RapidityOnLevel, "rapidity coincides with level " +
                                                    std::to_string(levels[i]));
      }
      out[i] += 1.0 / d;
    }
  }
  return out;
}

LambdaState lambda_from_rapidities(const GaudinModel& model, const RapiditySet& rap) {
  const std::size_t n = model.size();
  if (rap.size() > n) {
    throw Error(ErrorCode::InvalidArgument, "more rapidities than spins");
  }
  const std::vector<cplx> lam = lambda_at(model, model.epsilons(), rap.values);
  double largest = 0.0;
  for (const cplx& v : lam) largest = std::max(largest, std::abs(v));
  LambdaState out;
  out.axis = rap.axis;
  out.g = model.coupling();
  out.sector_m = rap.axis == Axis::Lambda ? rap.size() : n - rap.size();
  out.values.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(lam[i].imag()) > 1e-8 * std::max(largest, 1.0)) {
      throw Error(ErrorCode::NonRealLambda,
                  "imaginary part " + std::to_string(lam[i].imag()) + " at level " +
                      std::to_string(i));
    }
    out.values[i] = lam[i].real();
  }
  return out;
}

cplx lowest_weight(const GaudinModel& model, Axis axis, cplx u) {
  cplx f = axis_field(model, axis);
  for (double e : model.epsilons()) f -= 0.5 / (e - u);
  return f;
}

std::vector<cplx> bethe_residuals(const GaudinModel& model, const RapiditySet& rap) {
  const double guard = 1e-10 * std::max(model.span(), 1.0);
  for (std::size_t i = 0; i < rap.size(); ++i) {
    for (std::size_t j = i + 1; j < rap.size(); ++j) {
      if (std::abs(rap.values[i] - rap.values[j]) <= guard) {
        throw Error(ErrorCode::CoincidingRapidities, "rapidities " + std::to_string(i) +
                                                         " and " + std::to_string(j) +
                                                         " coincide");
      }
    }
  }
  const Eigen::Map<const Eigen::VectorXcd> v(rap.values.data(),
                                             static_cast<Eigen::Index>(rap.size()));
  const BetheEval eval = evaluate_bethe(model, rap.axis, v);
  return {eval.value.data(), eval.value.data() + eval.value.size()};
}

RapiditySet extract_rapidities(const GaudinModel& model, const LambdaState& lam) {
  if (lam.size() != model.size()) {
    throw Error(ErrorCode::LengthMismatch, "Lambda array length differs from N");
  }
  const std::size_t count = infer_rapidity_count(model, lam.values, lam.axis);
  if (count != lam.rapidity_count()) {
    throw Error(ErrorCode::SectorInference,
                "sum rule gives " + std::to_string(count) + " rapidities but the state declares " +
                    std::to_string(lam.rapidity_count()));
  }
  RapiditySet out;
  out.axis = lam.axis;
  if (count == 0) return out;

  const std::size_t n = model.size();
  const auto eps = model.epsilons();
  const auto [lo, hi] = std::minmax_element(eps.begin(), eps.end());
  const double center = 0.5 * (*lo + *hi);
  const double half = n > 1 ? 0.5 * (*hi - *lo) : std::max(1.0, std::abs(center));

  // Monic Q(x) = x^K + sum_k q_k x^k with u = center + half * x; the
  // condition P'(eps_i) = Lambda_i P(eps_i) becomes Q'(x_i) = t_i Q(x_i).
  const auto k_count = static_cast<Eigen::Index>(count);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(n), k_count);
  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double x = (eps[i] - center) / half;
    const double t = half * lam.values[i];
    const auto row = static_cast<Eigen::Index>(i);
    double xpow_prev = 0.0;  // x^{k-1}
    double xpow = 1.0;       // x^k
    for (Eigen::Index k = 0; k < k_count; ++k) {
      a(row, k) = static_cast<double>(k) * xpow_prev - t * xpow;
      xpow_prev = xpow;
      xpow *= x;
    }
    b[row] = -(static_cast<double>(count) * xpow_prev - t * xpow);
    const double scale = std::max(a.row(row).cwiseAbs().maxCoeff(), std::abs(b[row]));
    if (scale > 0.0) {
      a.row(row) /= scale;
      b[row] /= scale;
    }
  }
  const Eigen::VectorXd q = a.colPivHouseholderQr().solve(b);
  const double fit = (a * q - b).cwiseAbs().maxCoeff() / (1.0 + q.cwiseAbs().maxCoeff());
  if (!q.allFinite() || fit > 1e-6) {
    throw Error(ErrorCode::IllConditioned,
                "polynomial fit residual " + std::to_string(fit) + " for " +
                    std::to_string(count) + " rapidities");
  }

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(k_count, k_count);
  for (Eigen::Index k = 1; k < k_count; ++k) companion(k, k - 1) = 1.0;
  for (Eigen::Index k = 0; k < k_count; ++k) companion(k, k_count - 1) = -q[k];
  const Eigen::EigenSolver<Eigen::MatrixXd> roots(companion, false);
  if (roots.info() != Eigen::Success) {
    throw Error(ErrorCode::IllConditioned, "companion eigenvalues did not converge");
  }
  Eigen::VectorXcd rap = center + half * roots.eigenvalues().array();

  BetheEval eval = evaluate_bethe(model, lam.axis, rap);
  for (int it = 0; it < 30 && eval.scaled_inf > 1e-15; ++it) {
    const Eigen::VectorXcd delta = bethe_jacobian(model, rap).partialPivLu().solve(-eval.value);
    if (!delta.allFinite()) break;
    Eigen::VectorXcd trial = rap + delta;
    BetheEval next = evaluate_bethe(model, lam.axis, trial);
    if (!(next.scaled_inf < eval.scaled_inf)) break;
    rap = std::move(trial);
    eval = std::move(next);
  }
  symmetrize_conjugates(rap);
  eval = evaluate_bethe(model, lam.axis, rap);
  if (!(eval.scaled_inf <= 1e-6)) {
    Eigen::Index worst = 0;
    eval.value.cwiseAbs().maxCoeff(&worst);
    throw Error(ErrorCode::PolishDiverged,
                "root " + std::to_string(worst) + " keeps scaled Bethe residual " +
                    std::to_string(eval.scaled_inf));
  }
  out.values.assign(rap.data(), rap.data() + rap.size());
  std::sort(out.values.begin(), out.values.end(), [](const cplx& x, const cplx& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

cplx tau_eigenvalue(const GaudinModel& model, const RapiditySet& rap, cplx u) {
  const double guard = pole_guard(model);
  for (double e : model.epsilons()) {
    if (std::abs(u - e) <= guard) throw Error(ErrorCode::PoleEvaluation, "u sits on a level");
  }
  for (const cplx& r : rap.values) {
    if (std::abs(u - r) <= guard) throw Error(ErrorCode::PoleEvaluation, "u sits on a rapidity");
  }
  const cplx f = lowest_weight(model, rap.axis, u);
  cplx df = 0.0;
  for (double e : model.epsilons()) df -= 0.5 / ((e - u) * (e - u));
  cplx s1 = 0.0;
  cplx s2 = 0.0;
  for (const cplx& r : rap.values) {
    const cplx w = 1.0 / (u - r);
    s1 += w;
    s2 += w * w;
  }
  return f * f - df - 2.0 * f * s1 + (s1 * s1 - s2);
}

}  // namespace gaudin
