#include "gaudin/lambda_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <string>

#include "gaudin/error.hpp"
#include "gaudin/parallel.hpp"

namespace gaudin {

namespace {

double solved_g(const GaudinModel& model, const LambdaState& lam) {
  return lam.g != 0.0 ? lam.g : model.coupling();
}

double axis_sign(Axis axis) { return axis == Axis::Lambda ? -1.0 : 1.0; }

// Extended precision for the residual. Near-singular Jacobians amplify
// residual rounding, and a residual exact to ~1e-34 keeps Newton with a
// double LU converging to the correctly rounded solution.
__extension__ typedef __float128 wide;

// Residual together with the magnitude of the largest term in each
// component, so convergence can be judged relative to cancellation.
struct ScaledResidual {
  Eigen::VectorXd value;
  double scaled_inf = 0.0;
  double abs_inf = 0.0;
};

// 1/(eps_j - eps_i) in extended precision, row j.
class InverseGaps {
 public:
  explicit InverseGaps(const GaudinModel& model)
      : n_(model.size()), inv_(n_ * n_, wide(0)), inv_double_(n_ * n_, 0.0) {
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t i = 0; i < n_; ++i) {
        if (i != j) {
          inv_[j * n_ + i] =
              1 / (static_cast<wide>(model.epsilon(j)) - static_cast<wide>(model.epsilon(i)));
          inv_double_[j * n_ + i] = static_cast<double>(inv_[j * n_ + i]);
        }
      }
    }
  }
  const wide* row(std::size_t j) const { return inv_.data() + j * n_; }
  const double* row_double(std::size_t j) const { return inv_double_.data() + j * n_; }

 private:
  std::size_t n_;
  std::vector<wide> inv_;
  std::vector<double> inv_double_;
};

ScaledResidual scaled_residual(const InverseGaps& gaps, const GaudinModel& model,
                               const LambdaState& lam) {
  const std::size_t n = model.size();
  const wide field = static_cast<wide>(axis_sign(lam.axis) * 2.0) / static_cast<wide>(solved_g(model, lam));
  std::vector<wide> values(lam.values.begin(), lam.values.end());
  ScaledResidual out;
  out.value.resize(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const wide lj = values[j];
    const wide* inv = gaps.row(j);
    wide coupling_sum = 0;
    double coupling_mag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == j) continue;
      coupling_sum += (lj - values[i]) * inv[i];
      coupling_mag += std::abs((lam.values[j] - lam.values[i]) * gaps.row_double(j)[i]);
    }
    const double r = static_cast<double>(lj * lj - coupling_sum + field * lj);
    const double ld = lam.values[j];
    const double scale =
        std::max({1.0, ld * ld, coupling_mag, std::abs(static_cast<double>(field) * ld)});
    out.value[static_cast<Eigen::Index>(j)] = r;
    out.abs_inf = std::max(out.abs_inf, std::abs(r));
    out.scaled_inf = std::max(out.scaled_inf, std::abs(r) / scale);
    if (!std::isfinite(r)) {
      out.abs_inf = out.scaled_inf = std::numeric_limits<double>::infinity();
    }
  }
  return out;
}

ScaledResidual scaled_residual(const GaudinModel& model, const LambdaState& lam) {
  return scaled_residual(InverseGaps(model), model, lam);
}

// Applies one Newton step and returns its infinity norm, or infinity.
double newton_step(const GaudinModel& model, LambdaState& lam, const Eigen::VectorXd& residual) {
  const Eigen::MatrixXd jac = quadratic_jacobian(model, lam);
  const Eigen::VectorXd delta = jac.partialPivLu().solve(-residual);
  if (!delta.allFinite()) return std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < lam.values.size(); ++j) {
    lam.values[j] += delta[static_cast<Eigen::Index>(j)];
  }
  return delta.cwiseAbs().maxCoeff();
}

double inf_norm(const LambdaState& lam) {
  double m = 1.0;
  for (double v : lam.values) m = std::max(m, std::abs(v));
  return m;
}

constexpr int kPolishSteps = 8;

// d Lambda / d g along the solution branch.
Eigen::VectorXd branch_tangent(const GaudinModel& model, const LambdaState& lam) {
  const double g = solved_g(model, lam);
  Eigen::VectorXd dres_dg(static_cast<Eigen::Index>(lam.size()));
  for (std::size_t j = 0; j < lam.size(); ++j) {
    dres_dg[static_cast<Eigen::Index>(j)] = -axis_sign(lam.axis) * 2.0 * lam.values[j] / (g * g);
  }
  return quadratic_jacobian(model, lam).partialPivLu().solve(-dres_dg);
}

constexpr int kCorrectorIters = 10;
constexpr int kMaxRungs = 100000;

// Quadratic Lagrange extrapolation of the last three rungs to coupling g.
LambdaState extrapolate(const std::vector<LambdaState>& h, double g) {
  const LambdaState& a = h[h.size() - 3];
  const LambdaState& b = h[h.size() - 2];
  const LambdaState& c = h[h.size() - 1];
  const double wa = (g - b.g) * (g - c.g) / ((a.g - b.g) * (a.g - c.g));
  const double wb = (g - a.g) * (g - c.g) / ((b.g - a.g) * (b.g - c.g));
  const double wc = (g - a.g) * (g - b.g) / ((c.g - a.g) * (c.g - b.g));
  LambdaState out = c;
  out.g = g;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out.values[j] = wa * a.values[j] + wb * b.values[j] + wc * c.values[j];
  }
  return out;
}

double inf_distance(const LambdaState& a, const LambdaState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a.values[i] - b.values[i]));
  return d;
}

// A corrector that lands far from the predictor, or off the sector's sum
// rule, has jumped to another root.
bool stays_on_branch(const GaudinModel& model, const LambdaState& prev, const LambdaState& predicted,
                     const LambdaState& corrected) {
  double scale = 0.0;
  for (double v : corrected.values) scale = std::max(scale, std::abs(v));
  const double defect = std::abs(sum_rule_defect(model, corrected));
  if (defect > 1e-6 * std::max(scale, 1.0) * static_cast<double>(model.size())) return false;
  const double step = inf_distance(prev, predicted);
  return inf_distance(predicted, corrected) <= 0.5 * step + 1e-9 * std::max(scale, 1.0);
}

}  // namespace

void ContinuationConfig::validate() const {
  if (!(g_start >= 0.0) || !std::isfinite(g_start)) {
    throw Error(ErrorCode::InvalidArgument, "g_start must be a small non-negative number");
  }
  if (!(step_factor > 1.0 && step_factor <= 2.0)) {
    throw Error(ErrorCode::InvalidArgument, "step_factor must lie in (1, 2]");
  }
  if (!(newton_tol >= 1e-14 && newton_tol <= 1e-6)) {
    throw Error(ErrorCode::InvalidArgument, "newton_tol must lie in [1e-14, 1e-6]");
  }
  if (max_newton_iters < 1 || max_backtracks < 0) {
    throw Error(ErrorCode::InvalidArgument, "iteration limits must be positive");
  }
}

double ContinuationConfig::first_rung(const GaudinModel& model) const {
  if (g_start > 0.0) return g_start;
  const double spacing = model.size() > 1 ? model.min_spacing() : 1.0;
  return 1e-3 * spacing;
}

std::vector<double> quadratic_residual(const GaudinModel& model, const LambdaState& lam) {
  if (lam.size() != model.size()) {
    throw Error(ErrorCode::LengthMismatch, "Lambda array length differs from N");
  }
  const Eigen::VectorXd r = scaled_residual(model, lam).value;
  return {r.data(), r.data() + r.size()};
}

double residual_inf_norm(const GaudinModel& model, const LambdaState& lam) {
  if (lam.size() != model.size()) {
    throw Error(ErrorCode::LengthMismatch, "Lambda array length differs from N");
  }
  return scaled_residual(model, lam).abs_inf;
}

Eigen::MatrixXd quadratic_jacobian(const GaudinModel& model, const LambdaState& lam) {
  const std::size_t n = model.size();
  const double field = axis_sign(lam.axis) * 2.0 / solved_g(model, lam);
  Eigen::MatrixXd jac(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k == j) {
        jac(j, k) = 2.0 * lam.values[j] - model.level_sum(j) + field;
      } else {
        jac(j, k) = 1.0 / (model.epsilon(j) - model.epsilon(k));
      }
    }
  }
  return jac;
}

LambdaState seed_state(const GaudinModel& model, const BasisOccupation& occ, double g_small) {
  if (occ.num_sites() != model.size()) {
    throw Error(ErrorCode::InvalidOccupation, "occupation does not match the model size");
  }
  if (g_small == 0.0) throw Error(ErrorCode::ZeroCoupling, "seed coupling must be nonzero");
  LambdaState lam;
  lam.axis = Axis::Lambda;
  lam.sector_m = occ.size();
  lam.g = g_small;
  lam.values.assign(model.size(), 0.0);
  for (std::size_t j = 0; j < model.size(); ++j) {
    // occupied: 2/g + sum over empty levels; empty: sum over occupied levels
    const bool occupied = occ.contains(j);
    double v = occupied ? 2.0 / g_small : 0.0;
    for (std::size_t k = 0; k < model.size(); ++k) {
      if (k != j && occ.contains(k) != occupied) v += 1.0 / (model.epsilon(j) - model.epsilon(k));
    }
    lam.values[j] = v;
  }
  return lam;
}

namespace {

// Newton to the scaled tolerance; with `polish`, further steps while they
// keep shrinking, down to rounding level.
int refine(const InverseGaps& gaps, const GaudinModel& model, LambdaState& lam, double tol,
           int max_iters, bool polish) {
  for (int it = 0; it <= max_iters; ++it) {
    ScaledResidual res = scaled_residual(gaps, model, lam);
    if (!std::isfinite(res.scaled_inf)) return -1;
    if (res.scaled_inf <= tol) {
      if (!polish) return it;
      double last_step = std::numeric_limits<double>::infinity();
      for (int extra = 0; extra < kPolishSteps; ++extra) {
        LambdaState trial = lam;
        const double step = newton_step(model, trial, res.value);
        if (!(step < last_step)) break;
        lam = std::move(trial);
        res = scaled_residual(gaps, model, lam);
        last_step = step;
        if (step <= 1e-16 * inf_norm(lam)) break;
      }
      return res.scaled_inf <= tol ? it : -1;
    }
    if (it == max_iters) break;
    if (!std::isfinite(newton_step(model, lam, res.value))) return -1;
  }
  return -1;
}

}  // namespace

int newton_refine(const GaudinModel& model, LambdaState& lam, double tol, int max_iters) {
  return refine(InverseGaps(model), model, lam, tol, max_iters, true);
}

LambdaState solve_sector(const GaudinModel& model, const BasisOccupation& occ,
                         const ContinuationConfig& cfg) {
  cfg.validate();
  const double target = model.coupling();
  const double sign = target > 0.0 ? 1.0 : -1.0;
  const double first = cfg.first_rung(model);
  const InverseGaps gaps(model);

  if (std::abs(target) <= first) {
    LambdaState lam = seed_state(model, occ, target);
    if (refine(gaps, model, lam, cfg.newton_tol, cfg.max_newton_iters, true) < 0) {
      throw NoConvergence(target, "Newton failed at the target coupling from the seed");
    }
    return lam;
  }

  LambdaState lam = seed_state(model, occ, sign * first);
  if (refine(gaps, model, lam, cfg.newton_tol, cfg.max_newton_iters, true) < 0) {
    throw NoConvergence(lam.g, "Newton failed on the first rung");
  }

  // Accepted rungs, newest last, for the extrapolating predictor.
  std::vector<LambdaState> history{lam};
  const int corrector_iters = std::min(cfg.max_newton_iters, kCorrectorIters);
  auto correct = [&](LambdaState trial) -> std::optional<std::pair<LambdaState, int>> {
    const LambdaState predicted = trial;
    const int iters = refine(gaps, model, trial, cfg.newton_tol, corrector_iters, false);
    if (iters < 0 || !stays_on_branch(model, lam, predicted, trial)) return std::nullopt;
    return std::make_pair(std::move(trial), iters);
  };

  double ratio = cfg.step_factor;
  int backtracks = 0;
  for (int rung = 0; lam.g != target; ++rung) {
    if (rung > kMaxRungs) {
      throw NoConvergence(lam.g, "rung limit reached continuing towards g = " + std::to_string(target));
    }
    const double next_abs = std::min(std::abs(lam.g) * ratio, std::abs(target));
    const double next_g = next_abs == std::abs(target) ? target : sign * next_abs;

    std::optional<std::pair<LambdaState, int>> accepted;
    const Eigen::VectorXd tangent = branch_tangent(model, lam);
    if (tangent.allFinite()) {
      LambdaState trial = lam;
      for (std::size_t j = 0; j < trial.size(); ++j) {
        trial.values[j] += (next_g - lam.g) * tangent[static_cast<Eigen::Index>(j)];
      }
      trial.g = next_g;
      accepted = correct(std::move(trial));
    }
    // Near a singular Jacobian the tangent is unreliable but the branch is
    // still smooth, so extrapolate through the last three rungs.
    if (!accepted && history.size() >= 3) {
      accepted = correct(extrapolate(history, next_g));
    }
    if (!accepted) {
      if (++backtracks > cfg.max_backtracks) {
        throw NoConvergence(lam.g, "step halvings exhausted continuing occupation towards g = " +
                                       std::to_string(target));
      }
      ratio = std::sqrt(ratio);
      continue;
    }
    lam = std::move(accepted->first);
    history.push_back(lam);
    if (history.size() > 3) history.erase(history.begin());
    backtracks = 0;
    // Recover the step size after an easy rung.
    if (accepted->second <= 3) ratio = std::min(cfg.step_factor, ratio * ratio);
  }

  if (refine(gaps, model, lam, cfg.newton_tol, cfg.max_newton_iters, true) < 0) {
    throw NoConvergence(lam.g, "final refinement failed");
  }
  return lam;
}

std::vector<std::pair<std::size_t, std::size_t>> find_collisions(
    const std::vector<LambdaState>& states, double threshold) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t a = 0; a < states.size(); ++a) {
    for (std::size_t b = a + 1; b < states.size(); ++b) {
      double d = 0.0;
      for (std::size_t i = 0; i < states[a].size(); ++i) {
        d = std::max(d, std::abs(states[a].values[i] - states[b].values[i]));
      }
      if (d < threshold) out.emplace_back(a, b);
    }
  }
  return out;
}

SectorSolution solve_all_in_sector(const GaudinModel& model, std::size_t m,
                                   const ContinuationConfig& cfg) {
  if (m > model.size()) {
    throw Error(ErrorCode::InvalidArgument, "sector M exceeds N");
  }
  SectorSolution out;
  out.sector_m = m;
  out.occupations = sector_occupations(model.size(), m);
  out.states.resize(out.occupations.size());
  parallel_for(out.occupations.size(), [&](std::size_t k) {
    out.states[k] = solve_sector(model, out.occupations[k], cfg);
  });
  out.collisions = find_collisions(out.states);
  return out;
}

LambdaState transform_axis(const GaudinModel& model, const LambdaState& lam, double tol) {
  if (lam.size() != model.size()) {
    throw Error(ErrorCode::LengthMismatch, "Lambda array length differs from N");
  }
  const ScaledResidual res = scaled_residual(model, lam);
  if (!(res.scaled_inf <= tol)) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "scaled quadratic residual %.3e exceeds %.1e", res.scaled_inf, tol);
    throw Error(ErrorCode::NotAnEigenstate, msg);
  }
  const double g = solved_g(model, lam);
  LambdaState out = lam;
  out.g = g;
  const double shift = lam.axis == Axis::Lambda ? -2.0 / g : 2.0 / g;
  out.axis = lam.axis == Axis::Lambda ? Axis::Mu : Axis::Lambda;
  for (double& v : out.values) v += shift;
  return out;
}

double sum_rule_defect(const GaudinModel& model, const LambdaState& lam) {
  const double g = solved_g(model, lam);
  double sum = 0.0;
  for (double v : lam.values) sum += v;
  const double n = static_cast<double>(model.size());
  const double m = static_cast<double>(lam.sector_m);
  return lam.axis == Axis::Lambda ? sum - 2.0 * m / g : sum + 2.0 * (n - m) / g;
}

std::size_t infer_rapidity_count(const GaudinModel& model, std::span<const double> values,
                                 Axis axis) {
  double sum = 0.0;
  for (double v : values) sum += v;
  const double count = (axis == Axis::Lambda ? 0.5 : -0.5) * model.coupling() * sum;
  const double rounded = std::round(count);
  if (std::abs(count - rounded) > 1e-6 || rounded < 0.0 ||
      rounded > static_cast<double>(model.size())) {
    throw Error(ErrorCode::SectorInference,
                "sum rule implies a non-integer rapidity count " + std::to_string(count));
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace gaudin
