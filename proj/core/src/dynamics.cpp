#include "gaudin/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "gaudin/determinants.hpp"
#include "gaudin/ed_oracle.hpp"
#include "gaudin/error.hpp"
#include "gaudin/parallel.hpp"

namespace gaudin {

namespace {

std::vector<double> values_at(const LambdaState& s, const BasisOccupation& occ) {
  std::vector<double> out;
  out.reserve(occ.size());
  for (std::size_t site : occ.sites()) out.push_back(s.values[site]);
  return out;
}

// Per-state data shared by every row the state appears in.
struct StateWeights {
  double ket_overlap = 0.0;  // <occ|lambda>
  double bra_overlap = 0.0;  // <mu|occ>
  double norm = 0.0;         // <mu|lambda>
  double omega = 0.0;
  LambdaState lam;
  LambdaState mu;
};

StateWeights weigh(const MappedModel& mapped, const LambdaState& lam, const BasisOccupation& occ) {
  StateWeights w;
  w.lam = lam;
  w.mu = transform_axis(mapped.model, lam);
  const BasisOccupation down = occ.complement();
  w.ket_overlap = partition_overlap_det(mapped.model, occ, values_at(w.lam, occ));
  // <mu|occ> is the domain-wall function of the mu rapidities on the down sites
  w.bra_overlap = partition_overlap_det(mapped.model, down, values_at(w.mu, down));
  w.norm = norm_product(mapped.model, w.lam, w.mu);
  w.omega = hamiltonian_energy(mapped.eta, charge_eigenvalues(mapped.model, lam));
  return w;
}

void require_complete(const SectorSolution& s, std::size_t n, std::size_t m) {
  if (s.sector_m != m || s.states.size() != binomial(n, m)) {
    throw Error(ErrorCode::IncompleteSector,
                "sector " + std::to_string(m) + " holds " + std::to_string(s.states.size()) +
                    " states, expected " + std::to_string(binomial(n, m)));
  }
}

}  // namespace

void CentralSpinParams::validate() const {
  if (!std::isfinite(field)) throw Error(ErrorCode::NonFinite, "field is not finite");
  if (couplings.empty()) throw Error(ErrorCode::InvalidArgument, "no bath couplings");
  for (double a : couplings) {
    if (!std::isfinite(a)) throw Error(ErrorCode::NonFinite, "coupling is not finite");
    if (a == 0.0) throw Error(ErrorCode::InvalidArgument, "bath couplings must be nonzero");
  }
  if (bath_occupation.num_sites() != couplings.size()) {
    throw Error(ErrorCode::InvalidOccupation, "bath occupation does not match the bath size");
  }
  const double norm = std::norm(alpha) + std::norm(beta);
  if (std::abs(norm - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "|alpha|^2 + |beta|^2 must equal 1");
  }
}

MappedModel map_to_gaudin(const CentralSpinParams& params) {
  if (params.field == 0.0) throw Error(ErrorCode::ZeroField, "B = 0 has no finite coupling g");
  std::vector<double> eps{0.0};
  for (double a : params.couplings) {
    if (a == 0.0) throw Error(ErrorCode::InvalidArgument, "bath couplings must be nonzero");
    eps.push_back(-1.0 / a);
  }
  try {
    GaudinModel model(std::move(eps), -1.0 / params.field);
    std::vector<double> eta(model.size(), 0.0);
    eta[0] = 0.5;
    return {std::move(model), std::move(eta)};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DuplicateEpsilon) {
      throw Error(ErrorCode::DegenerateCouplings, "bath couplings must be pairwise distinct");
    }
    throw;
  }
}

BasisOccupation mapped_occupation(const CentralSpinParams& params) {
  std::vector<std::size_t> sites;
  for (std::size_t s : params.bath_occupation.sites()) sites.push_back(s + 1);
  return BasisOccupation(std::move(sites), params.couplings.size() + 1);
}

SpectralTable build_spectral_table(const CentralSpinParams& params, const MappedModel& mapped,
                                   const SectorSolution& lower, const SectorSolution& upper) {
  params.validate();
  const std::size_t n = mapped.model.size();
  const BasisOccupation occ_down = mapped_occupation(params);
  const BasisOccupation occ_up = occ_down.with(0);
  require_complete(lower, n, occ_down.size());
  require_complete(upper, n, occ_up.size());

  std::vector<StateWeights> lw(lower.states.size());
  std::vector<StateWeights> uw(upper.states.size());
  parallel_for(lw.size(), [&](std::size_t k) { lw[k] = weigh(mapped, lower.states[k], occ_down); });
  parallel_for(uw.size(), [&](std::size_t k) { uw[k] = weigh(mapped, upper.states[k], occ_up); });

  SpectralTable table;
  for (const StateWeights& w : lw) table.completeness_lower += w.ket_overlap * w.bra_overlap / w.norm;
  for (const StateWeights& w : uw) table.completeness_upper += w.ket_overlap * w.bra_overlap / w.norm;

  const cplx prefactor = std::conj(params.alpha) * params.beta;
  table.rows.resize(uw.size() * lw.size());
  parallel_for(uw.size(), [&](std::size_t a) {
    for (std::size_t b = 0; b < lw.size(); ++b) {
      const double form = splus_form_factor(mapped.model, 0, uw[a].mu, lw[b].lam).value;
      SpectralRow& row = table.rows[a * lw.size() + b];
      row.n = a;
      row.m = b;
      row.amplitude = prefactor * (uw[a].ket_overlap * form * lw[b].bra_overlap /
                                   (uw[a].norm * lw[b].norm));
      row.frequency = uw[a].omega - lw[b].omega;
    }
  });
  return table;
}

SpectralTable central_spin_table(const CentralSpinParams& params, const ContinuationConfig& cfg) {
  params.validate();
  const MappedModel mapped = map_to_gaudin(params);
  const std::size_t m = params.bath_occupation.size();
  const SectorSolution lower = solve_all_in_sector(mapped.model, m, cfg);
  const SectorSolution upper = solve_all_in_sector(mapped.model, m + 1, cfg);
  return build_spectral_table(params, mapped, lower, upper);
}

TimeSeries coherence_factor(const SpectralTable& table, std::span<const double> times,
                            const Sampling& sampling) {
  if (table.rows.empty()) throw Error(ErrorCode::EmptyTable, "spectral table has no rows");
  TimeSeries out;
  out.times.assign(times.begin(), times.end());
  out.values.assign(times.size(), cplx{});

  const auto* mc = std::get_if<MonteCarloSampling>(&sampling);
  if (mc == nullptr || mc->count >= table.rows.size()) {
    parallel_for(times.size(), [&](std::size_t k) {
      cplx sum = 0.0;
      for (const SpectralRow& row : table.rows) {
        sum += row.amplitude * std::exp(cplx(0.0, row.frequency * times[k]));
      }
      out.values[k] = sum;
    });
    if (mc != nullptr) out.std_error.assign(times.size(), 0.0);
    return out;
  }
  if (mc->count == 0) throw Error(ErrorCode::InvalidArgument, "Monte Carlo count must be positive");

  std::vector<double> weights;
  weights.reserve(table.rows.size());
  double total = 0.0;
  for (const SpectralRow& row : table.rows) {
    weights.push_back(std::abs(row.amplitude));
    total += weights.back();
  }
  if (total == 0.0) {
    out.std_error.assign(times.size(), 0.0);
    return out;
  }
  std::mt19937_64 rng(mc->seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::vector<std::size_t> draws(mc->count);
  for (std::size_t& d : draws) d = pick(rng);

  out.std_error.assign(times.size(), 0.0);
  const double samples = static_cast<double>(mc->count);
  parallel_for(times.size(), [&](std::size_t k) {
    cplx sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t d : draws) {
      const SpectralRow& row = table.rows[d];
      const cplx x = (row.amplitude / (weights[d] / total)) * std::exp(cplx(0.0, row.frequency * times[k]));
      sum += x;
      sum_sq += std::norm(x);
    }
    const cplx mean = sum / samples;
    const double variance =
        mc->count > 1 ? std::max(0.0, (sum_sq - samples * std::norm(mean)) / (samples - 1.0)) : 0.0;
    out.values[k] = mean;
    out.std_error[k] = std::sqrt(variance / samples);
  });
  return out;
}

std::vector<double> time_grid(double start, double stop, std::size_t count) {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = start;
    return out;
  }
  for (std::size_t k = 0; k < count; ++k) {
    out[k] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
  }
  return out;
}

std::vector<cplx> coherence_by_exact_evolution(const CentralSpinParams& params,
                                               std::span<const double> times) {
  params.validate();
  const std::size_t n = params.couplings.size() + 1;
  ed::require_oracle_size(n);
  const BasisOccupation down = mapped_occupation(params);
  const ed::StateVector psi0 =
      params.alpha * ed::basis_state(down.with(0)) + params.beta * ed::basis_state(down);
  const auto dim = static_cast<Eigen::Index>(std::size_t{1} << n);
  ed::OperatorMatrix splus0 = ed::OperatorMatrix::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; s += 2) splus0(s + 1, s) = 1.0;
  return ed::evolve_expectation(ed::central_spin_hamiltonian(params.field, params.couplings), psi0,
                                splus0, times);
}

}  // namespace gaudin
