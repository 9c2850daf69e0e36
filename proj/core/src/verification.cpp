#include "gaudin/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>

#include "gaudin/determinants.hpp"
#include "gaudin/ed_oracle.hpp"
#include "gaudin/error.hpp"
#include "gaudin/rapidity.hpp"

namespace gaudin::verify {

namespace {

using Clock = std::chrono::steady_clock;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  Clock::time_point start_ = Clock::now();
};

double rel_diff(cplx a, cplx b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

CheckResult start(std::string name, double tol) {
  CheckResult r;
  r.name = std::move(name);
  r.passed = true;
  r.tolerance = tol;
  return r;
}

CheckResult finish(CheckResult r, const Timer& t) {
  r.seconds = t.seconds();
  r.passed = r.passed && r.worst <= r.tolerance;
  return r;
}

// Solved state with the objects every oracle comparison needs.
struct PreparedState {
  LambdaState lam;
  LambdaState mu;
  RapiditySet lam_rap;
  ed::StateVector lam_vec;
  ed::StateVector mu_vec;
};

PreparedState prepare(const GaudinModel& model, const LambdaState& lam) {
  PreparedState p;
  p.lam = lam;
  p.mu = transform_axis(model, lam);
  p.lam_rap = extract_rapidities(model, p.lam);
  p.lam_vec = ed::build_bethe_vector(model, p.lam_rap);
  p.mu_vec = ed::build_bethe_vector(model, extract_rapidities(model, p.mu));
  return p;
}

std::vector<std::size_t> sample_indices(std::size_t total, std::size_t wanted, std::mt19937_64& rng) {
  std::vector<std::size_t> idx(total);
  for (std::size_t k = 0; k < total; ++k) idx[k] = k;
  if (wanted < total) {
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(wanted);
    std::sort(idx.begin(), idx.end());
  }
  return idx;
}

// Conjugate-closed random rapidities: real ones and complex pairs.
std::vector<cplx> random_closed_rapidities(std::size_t count, double span, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> re(-0.5 * span, 1.5 * span);
  std::uniform_real_distribution<double> im(0.1 * span, 1.0 * span);
  std::vector<cplx> out;
  while (out.size() < count) {
    if (count - out.size() >= 2 && (rng() & 1U)) {
      const cplx z(re(rng), im(rng));
      out.push_back(z);
      out.push_back(std::conj(z));
    } else {
      out.emplace_back(re(rng), 0.0);
    }
  }
  return out;
}

BasisOccupation random_occupation(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::vector<std::size_t> sites(n);
  for (std::size_t k = 0; k < n; ++k) sites[k] = k;
  std::shuffle(sites.begin(), sites.end(), rng);
  sites.resize(m);
  std::sort(sites.begin(), sites.end());
  return BasisOccupation(std::move(sites), n);
}

}  // namespace

std::string describe(const CheckResult& r) {
  char buf[256];
  const char* status = r.skipped ? "SKIP" : (r.passed ? "PASS" : "FAIL");
  std::snprintf(buf, sizeof(buf), "[%s] %-34s worst=%.3e tol=%.1e (%.2fs)", status, r.name.c_str(),
                r.worst, r.tolerance, r.seconds);
  std::string out = buf;
  if (!r.detail.empty()) out += "  " + r.detail;
  return out;
}

std::vector<double> random_levels(std::size_t n, std::uint64_t seed) {
  if (n == 1) return {0.0};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-0.35, 0.35);
  std::vector<double> eps(n);
  for (std::size_t k = 0; k < n; ++k) {
    eps[k] = (static_cast<double>(k) + jitter(rng)) / static_cast<double>(n - 1);
  }
  const double lo = eps.front();
  const double span = eps.back() - lo;
  for (double& e : eps) e = (e - lo) / span;
  return eps;
}

std::vector<SectorSolution> solve_all_sectors(const GaudinModel& model, const ContinuationConfig& cfg) {
  std::vector<SectorSolution> out;
  for (std::size_t m = 0; m <= model.size(); ++m) out.push_back(solve_all_in_sector(model, m, cfg));
  return out;
}

CheckResult partition_triple(std::size_t instances, std::size_t max_n, std::size_t max_m,
                             std::uint64_t seed, double tol) {
  Timer timer;
  CheckResult r = start("partition function triple", tol);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t n = 1 + rng() % max_n;
    const std::size_t m = 1 + rng() % std::min(n, max_m);
    const GaudinModel model(random_levels(n, rng()), 1.0);
    const BasisOccupation occ = random_occupation(n, m, rng);
    const double span = std::max(model.span(), 1.0);
    std::uniform_real_distribution<double> re(-0.5 * span, 1.5 * span);
    std::uniform_real_distribution<double> im(-2.0 * span, 2.0 * span);
    RapiditySet rap;
    for (std::size_t j = 0; j < m; ++j) rap.values.emplace_back(re(rng), im(rng));

    std::vector<double> levels;
    for (std::size_t s : occ.sites()) levels.push_back(model.epsilon(s));
    const std::vector<cplx> lam = lambda_at(model, levels, rap.values);
    const cplx via_det = partition_overlap_det(model, occ, lam);
    const cplx via_izergin = izergin_overlap(model, occ, rap);
    const cplx via_perm = partition_overlap_perm(model, occ, rap);
    r.worst = std::max({r.worst, rel_diff(via_det, via_perm), rel_diff(via_izergin, via_perm),
                        rel_diff(via_det, via_izergin)});
  }
  r.detail = std::to_string(instances) + " instances, N<=" + std::to_string(max_n) +
             ", M<=" + std::to_string(max_m);
  return finish(r, timer);
}

CheckResult recursion_residue(std::size_t instances, std::uint64_t seed, double tol) {
  Timer timer;
  CheckResult r = start("recursion residue", tol);
  std::mt19937_64 rng(seed);
  for (std::size_t k = 0; k < instances; ++k) {
    const std::size_t n = 2 + rng() % 9;
    const std::size_t m = 2 + rng() % std::min<std::size_t>(n - 1, 6);
    const GaudinModel model(random_levels(n, rng()), 1.0);
    const BasisOccupation occ = random_occupation(n, m, rng);
    std::uniform_real_distribution<double> re(-0.5, 1.5);
    std::uniform_real_distribution<double> im(-2.0, 2.0);
    std::vector<cplx> rap;
    for (std::size_t j = 0; j + 1 < m; ++j) rap.emplace_back(re(rng), im(rng));
    const std::size_t pole = rng() % m;
    const double eps_pole = model.epsilon(occ[pole]);

    std::vector<double> levels;
    for (std::size_t s : occ.sites()) levels.push_back(model.epsilon(s));
    // symmetric pair of points at distance 1e-6 cancels the regular part
    const double delta = 1e-6 * model.span();
    cplx residue = 0.0;
    for (double side : {1.0, -1.0}) {
      std::vector<cplx> full = rap;
      full.emplace_back(eps_pole + side * delta, 0.0);
      residue += 0.5 * side * delta * partition_overlap_det(model, occ, lambda_at(model, levels, full));
    }
    const BasisOccupation reduced = occ.without(occ[pole]);
    std::vector<double> reduced_levels;
    for (std::size_t s : reduced.sites()) reduced_levels.push_back(model.epsilon(s));
    const cplx expected = partition_overlap_det(model, reduced, lambda_at(model, reduced_levels, rap));
    r.worst = std::max(r.worst, rel_diff(residue, expected));
  }
  r.detail = std::to_string(instances) + " instances";
  return finish(r, timer);
}

CheckResult solver_completeness(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                                double residual_tol, double sum_rule_factor) {
  Timer timer;
  CheckResult r = start("solver completeness", residual_tol);
  const double sum_tol = sum_rule_factor * static_cast<double>(model.size()) / std::abs(model.coupling());
  double worst_sum = 0.0;
  std::size_t total = 0;
  for (const SectorSolution& s : sectors) {
    if (s.states.size() != binomial(model.size(), s.sector_m) || !s.collisions.empty()) {
      r.passed = false;
      r.detail += "sector " + std::to_string(s.sector_m) + ": " + std::to_string(s.states.size()) +
                  " states, " + std::to_string(s.collisions.size()) + " collisions; ";
    }
    total += s.states.size();
    for (const LambdaState& lam : s.states) {
      r.worst = std::max(r.worst, residual_inf_norm(model, lam));
      worst_sum = std::max(worst_sum, std::abs(sum_rule_defect(model, lam)));
    }
  }
  if (worst_sum > sum_tol) r.passed = false;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu states, sum rule %.2e (tol %.1e)", total, worst_sum, sum_tol);
  r.detail += buf;
  return finish(r, timer);
}

CheckResult representation_transform(const GaudinModel& model,
                                     const std::vector<SectorSolution>& sectors,
                                     double residual_tol, double charge_tol) {
  Timer timer;
  CheckResult r = start("representation transform", residual_tol);
  double worst_charge = 0.0;
  for (const SectorSolution& s : sectors) {
    for (const LambdaState& lam : s.states) {
      const LambdaState mu = transform_axis(model, lam);
      r.worst = std::max(r.worst, residual_inf_norm(model, mu));
      const ChargeEigenvalues a = charge_eigenvalues(model, lam);
      const ChargeEigenvalues b = charge_eigenvalues(model, mu);
      double scale = 0.0;
      double diff = 0.0;
      for (std::size_t i = 0; i < a.r.size(); ++i) {
        scale = std::max(scale, std::abs(a.r[i]));
        diff = std::max(diff, std::abs(a.r[i] - b.r[i]));
      }
      worst_charge = std::max(worst_charge, scale > 0.0 ? diff / scale : diff);
    }
  }
  if (worst_charge > charge_tol) r.passed = false;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "charge mismatch %.2e (tol %.1e)", worst_charge, charge_tol);
  r.detail = buf;
  return finish(r, timer);
}

CheckResult spectrum_equivalence(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                                 double tol) {
  Timer timer;
  CheckResult r = start("spectrum equivalence", tol);
  const std::vector<ed::SectorSpectrum> spectrum = ed::spectrum_by_sector(model);
  for (const SectorSolution& s : sectors) {
    std::vector<ChargeEigenvalues> solver;
    for (const LambdaState& lam : s.states) solver.push_back(charge_eigenvalues(model, lam));
    const ed::SectorSpectrum& ref = spectrum.at(s.sector_m);
    if (solver.size() != ref.charges.size()) {
      r.passed = false;
      r.detail += "count mismatch in sector " + std::to_string(s.sector_m) + "; ";
      continue;
    }
    const ed::Matching match = ed::match_charges(solver, ref.charges);
    r.worst = std::max(r.worst, match.worst);
  }
  r.detail += "N=" + std::to_string(model.size());
  return finish(r, timer);
}

CheckResult scalar_products(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                            std::size_t states_per_sector, std::uint64_t seed, double tol,
                            double orthogonality_tol) {
  Timer timer;
  CheckResult r = start("scalar products and norms", tol);
  std::mt19937_64 rng(seed);
  double worst_orth = 0.0;
  const std::size_t n = model.size();
  for (const SectorSolution& s : sectors) {
    std::vector<PreparedState> states;
    for (std::size_t k : sample_indices(s.states.size(), states_per_sector, rng)) {
      states.push_back(prepare(model, s.states[k]));
    }
    for (std::size_t a = 0; a < states.size(); ++a) {
      for (std::size_t b = 0; b < states.size(); ++b) {
        const double det_value = scalar_product_det(model, states[a].mu, states[b].lam).value;
        const cplx ed_value = ed::inner(states[a].mu_vec, states[b].lam_vec);
        if (a == b) {
          r.worst = std::max(r.worst, rel_diff(norm_product(model, states[a].lam, states[a].mu), ed_value));
          // the Lambda-axis bra form of the same product
          r.worst = std::max(r.worst, rel_diff(scalar_product_det(model, states[a].lam, states[a].lam).value,
                                               ed_value));
        } else {
          const double bound = states[a].mu_vec.norm() * states[b].lam_vec.norm();
          worst_orth = std::max({worst_orth, std::abs(det_value) / bound, std::abs(ed_value) / bound});
        }
      }
    }
    // states that solve nothing: random conjugate-closed rapidity sets
    for (int trial = 0; trial < 3; ++trial) {
      const RapiditySet ket{random_closed_rapidities(s.sector_m, model.span(), rng), Axis::Lambda};
      const RapiditySet bra{random_closed_rapidities(n - s.sector_m, model.span(), rng), Axis::Mu};
      const double det_value =
          scalar_product_det(model, lambda_from_rapidities(model, bra), lambda_from_rapidities(model, ket)).value;
      const cplx ed_value =
          ed::inner(ed::build_bethe_vector(model, bra), ed::build_bethe_vector(model, ket));
      r.worst = std::max(r.worst, rel_diff(det_value, ed_value));
    }
  }
  if (worst_orth > orthogonality_tol) r.passed = false;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "orthogonality %.2e (tol %.1e)", worst_orth, orthogonality_tol);
  r.detail = buf;
  return finish(r, timer);
}

CheckResult form_factors(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                         std::size_t pairs_per_sector, std::uint64_t seed, double tol) {
  Timer timer;
  CheckResult r = start("form factors S+ and Sz", tol);
  std::mt19937_64 rng(seed);
  const std::size_t n = model.size();
  double worst_plus = 0.0;
  double worst_z = 0.0;
  std::size_t pairs = 0;
  std::map<std::pair<std::size_t, std::size_t>, PreparedState> cache;
  auto state = [&](std::size_t m, std::size_t k) -> const PreparedState& {
    auto it = cache.find({m, k});
    if (it == cache.end()) it = cache.emplace(std::make_pair(m, k), prepare(model, sectors.at(m).states[k])).first;
    return it->second;
  };
  for (const SectorSolution& ket_sector : sectors) {
    const std::size_t m = ket_sector.sector_m;
    const std::size_t count = ket_sector.states.size();
    if (count == 0) continue;

    // S^z: bra and ket in the same sector
    for (std::size_t p = 0; p < pairs_per_sector; ++p) {
      const PreparedState& bra = state(m, rng() % count);
      const PreparedState& ket = state(m, rng() % count);
      for (std::size_t site = 0; site < n; ++site) {
        const double det_value = sz_form_factor(model, site, bra.mu, ket.lam, &ket.lam_rap).value;
        const cplx ed_value = ed::inner(bra.mu_vec, ed::apply_sz(ket.lam_vec, site));
        worst_z = std::max(worst_z, rel_diff(det_value, ed_value));
      }
      ++pairs;
    }
    if (m + 1 > n || sectors.at(m + 1).states.empty()) continue;
    const std::size_t bra_count = sectors.at(m + 1).states.size();
    for (std::size_t p = 0; p < pairs_per_sector; ++p) {
      const PreparedState& bra = state(m + 1, rng() % bra_count);
      const PreparedState& ket = state(m, rng() % count);
      for (std::size_t site = 0; site < n; ++site) {
        const double det_value = splus_form_factor(model, site, bra.mu, ket.lam).value;
        const cplx ed_value = ed::inner(bra.mu_vec, ed::apply_splus(ket.lam_vec, site));
        worst_plus = std::max(worst_plus, rel_diff(det_value, ed_value));
        const double minus_value = sminus_form_factor(model, site, ket.lam, bra.mu).value;
        const cplx ed_minus = ed::inner(ket.lam_vec, ed::apply_sminus(bra.mu_vec, site));
        worst_plus = std::max(worst_plus, rel_diff(minus_value, ed_minus));
      }
      ++pairs;
    }
  }
  r.worst = std::max(worst_plus, worst_z);
  char buf[128];
  std::snprintf(buf, sizeof(buf), "%zu pairs x %zu sites, S+/- %.2e, Sz %.2e (sign %+d)", pairs, n,
                worst_plus, worst_z, kSzCoefficientSign);
  r.detail = buf;
  return finish(r, timer);
}

SignDetermination determine_sz_sign() {
  SignDetermination out;
  std::ostringstream report;

  // One spin: <up|S^z B(lambda)|down> = (1/2)/(lambda - eps).
  {
    const GaudinModel model({0.3}, 0.7);
    const double lambda = -0.45;
    const RapiditySet rap{{cplx(lambda, 0.0)}, Axis::Lambda};
    const LambdaState ket = lambda_from_rapidities(model, rap);
    const LambdaState bra{{0.0}, Axis::Mu, 1, model.coupling()};
    const double exact = 0.5 / (lambda - 0.3);
    for (int sign : {+1, -1}) {
      const double v = sz_form_factor(model, 0, bra, ket, &rap, sign).value;
      double& err = sign > 0 ? out.error_plus : out.error_minus;
      err = std::max(err, rel_diff(v, exact));
    }
    report << "N=1 closed form 1/2/(lambda-eps) = " << exact << "; ";
  }

  // Two and three spins: explicit vectors with rapidities that solve nothing.
  std::mt19937_64 rng(7);
  for (std::size_t n : {2U, 3U}) {
    const GaudinModel model(random_levels(n, 100 + n), 0.9);
    for (std::size_t m = 1; m <= n; ++m) {
      for (int trial = 0; trial < 3; ++trial) {
        const RapiditySet ket_rap{random_closed_rapidities(m, 1.0, rng), Axis::Lambda};
        const RapiditySet bra_rap{random_closed_rapidities(n - m, 1.0, rng), Axis::Mu};
        const LambdaState ket = lambda_from_rapidities(model, ket_rap);
        const LambdaState bra = lambda_from_rapidities(model, bra_rap);
        const ed::StateVector ket_vec = ed::build_bethe_vector(model, ket_rap);
        const ed::StateVector bra_vec = ed::build_bethe_vector(model, bra_rap);
        for (std::size_t site = 0; site < n; ++site) {
          const cplx exact = ed::inner(bra_vec, ed::apply_sz(ket_vec, site));
          for (int sign : {+1, -1}) {
            const double v = sz_form_factor(model, site, bra, ket, &ket_rap, sign).value;
            double& err = sign > 0 ? out.error_plus : out.error_minus;
            err = std::max(err, rel_diff(v, exact));
          }
        }
      }
    }
  }
  out.sign = out.error_plus < out.error_minus ? +1 : -1;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "coefficient +1/(lambda_j-eps_i): worst rel err %.2e; -1/(lambda_j-eps_i): %.2e; "
                "selected %s",
                out.error_plus, out.error_minus,
                out.sign > 0 ? "+1/(lambda_j-eps_i)" : "1/(eps_i-lambda_j)");
  report << "N=2,3 explicit vectors; " << buf;
  out.report = report.str();
  return out;
}

CheckResult central_spin_dynamics(const CentralSpinParams& params, std::span<const double> times,
                                  double tol, double t0_tol, double completeness_tol) {
  Timer timer;
  CheckResult r = start("central-spin coherence", tol);
  const SpectralTable table = central_spin_table(params);
  const TimeSeries series = coherence_factor(table, times);
  const std::vector<cplx> exact = coherence_by_exact_evolution(params, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    r.worst = std::max(r.worst, std::abs(series.values[k] - exact[k]));
  }
  const std::array<double, 1> zero{0.0};
  const cplx at_zero = coherence_factor(table, zero).values[0];
  const double t0_err = std::abs(at_zero - std::conj(params.alpha) * params.beta);
  const double completeness_err = std::max(std::abs(table.completeness_lower - 1.0),
                                           std::abs(table.completeness_upper - 1.0));
  if (t0_err > t0_tol || completeness_err > completeness_tol) r.passed = false;
  char buf[192];
  std::snprintf(buf, sizeof(buf), "%zu rows, %zu times, t=0 err %.2e (tol %.0e), completeness err %.2e (tol %.0e)",
                table.rows.size(), times.size(), t0_err, t0_tol, completeness_err, completeness_tol);
  r.detail = buf;
  return finish(r, timer);
}

CheckResult jacobian_finite_difference(const GaudinModel& model, std::size_t samples,
                                       std::uint64_t seed, double tol) {
  Timer timer;
  CheckResult r = start("jacobian vs finite differences", tol);
  std::mt19937_64 rng(seed);
  const double scale = 2.0 / std::abs(model.coupling()) + 1.0 / std::max(model.min_spacing(), 1e-3);
  std::uniform_real_distribution<double> value(-scale, scale);
  const double h = 1e-6;
  for (std::size_t k = 0; k < samples; ++k) {
    LambdaState lam;
    lam.axis = k % 2 == 0 ? Axis::Lambda : Axis::Mu;
    lam.g = model.coupling();
    lam.values.resize(model.size());
    for (double& v : lam.values) v = value(rng);
    const Eigen::MatrixXd jac = quadratic_jacobian(model, lam);
    Eigen::MatrixXd fd(jac.rows(), jac.cols());
    for (std::size_t c = 0; c < model.size(); ++c) {
      LambdaState up = lam;
      LambdaState down = lam;
      up.values[c] += h;
      down.values[c] -= h;
      const std::vector<double> ru = quadratic_residual(model, up);
      const std::vector<double> rd = quadratic_residual(model, down);
      for (std::size_t row = 0; row < model.size(); ++row) {
        fd(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c)) = (ru[row] - rd[row]) / (2.0 * h);
      }
    }
    r.worst = std::max(r.worst, (jac - fd).cwiseAbs().maxCoeff() / jac.cwiseAbs().maxCoeff());
  }
  r.detail = std::to_string(samples) + " random points";
  return finish(r, timer);
}

CheckResult rapidity_round_trip(const GaudinModel& model, const std::vector<SectorSolution>& sectors,
                                double tol) {
  Timer timer;
  CheckResult r = start("rapidity round trip", tol);
  std::size_t count = 0;
  std::size_t failures = 0;
  for (const SectorSolution& s : sectors) {
    for (const LambdaState& lam : s.states) {
      try {
        const LambdaState back = lambda_from_rapidities(model, extract_rapidities(model, lam));
        for (std::size_t i = 0; i < lam.size(); ++i) {
          r.worst = std::max(r.worst, std::abs(back.values[i] - lam.values[i]));
        }
      } catch (const Error& e) {
        ++failures;
        r.passed = false;
        if (failures == 1) r.detail = std::string("first failure: ") + e.what() + "; ";
      }
      ++count;
    }
  }
  r.detail += std::to_string(count) + " states, N=" + std::to_string(model.size()) + ", " +
              std::to_string(failures) + " extraction failures";
  return finish(r, timer);
}

}  // namespace gaudin::verify
