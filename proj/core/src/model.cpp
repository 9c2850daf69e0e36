#include "gaudin/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gaudin/error.hpp"

namespace gaudin {

namespace {

constexpr double kDistinctLevels = 1e-10;

}  // namespace

GaudinModel::GaudinModel(std::vector<double> epsilons, double coupling)
    : epsilons_(std::move(epsilons)), coupling_(coupling), omega_(epsilons_.size()) {
  if (epsilons_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "model needs at least one level");
  }
  if (!std::isfinite(coupling_)) throw Error(ErrorCode::NonFinite, "coupling g is not finite");
  for (double e : epsilons_) {
    if (!std::isfinite(e)) throw Error(ErrorCode::NonFinite, "level energy is not finite");
  }
  if (coupling_ == 0.0) throw Error(ErrorCode::ZeroCoupling, "g must be nonzero");

  std::vector<double> sorted = epsilons_;
  std::sort(sorted.begin(), sorted.end());
  span_ = sorted.back() - sorted.front();
  min_spacing_ = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < sorted.size(); ++k) {
    min_spacing_ = std::min(min_spacing_, sorted[k] - sorted[k - 1]);
  }
  if (sorted.size() > 1) {
    // a zero span means every level coincides
    if (span_ == 0.0 || min_spacing_ <= kDistinctLevels * span_) {
      throw Error(ErrorCode::DuplicateEpsilon,
                  "levels closer than 1e-10 of the span (min spacing " +
                      std::to_string(min_spacing_) + ")");
    }
  } else {
    span_ = 0.0;
  }

  level_sums_.assign(epsilons_.size(), 0.0);
  for (std::size_t a = 0; a < epsilons_.size(); ++a) {
    for (std::size_t c = 0; c < epsilons_.size(); ++c) {
      if (c != a) level_sums_[a] += 1.0 / (epsilons_[a] - epsilons_[c]);
    }
  }
}

GaudinModel new_model(std::vector<double> epsilons, double coupling) {
  return GaudinModel(std::move(epsilons), coupling);
}

BasisOccupation::BasisOccupation(std::vector<std::size_t> up_sites, std::size_t num_sites)
    : sites_(std::move(up_sites)), num_sites_(num_sites) {
  for (std::size_t k = 0; k < sites_.size(); ++k) {
    if (sites_[k] >= num_sites_) {
      throw Error(ErrorCode::InvalidOccupation,
                  "site " + std::to_string(sites_[k]) + " outside [0, " +
                      std::to_string(num_sites_) + ")");
    }
    if (k > 0 && sites_[k] <= sites_[k - 1]) {
      throw Error(ErrorCode::InvalidOccupation, "up sites must be strictly increasing");
    }
  }
}

BasisOccupation BasisOccupation::from_mask(std::uint64_t mask, std::size_t num_sites) {
  std::vector<std::size_t> sites;
  for (std::size_t i = 0; i < num_sites; ++i) {
    if ((mask >> i) & 1U) sites.push_back(i);
  }
  return BasisOccupation(std::move(sites), num_sites);
}

bool BasisOccupation::contains(std::size_t site) const {
  return std::binary_search(sites_.begin(), sites_.end(), site);
}

std::uint64_t BasisOccupation::mask() const {
  std::uint64_t m = 0;
  for (std::size_t s : sites_) m |= std::uint64_t{1} << s;
  return m;
}

BasisOccupation BasisOccupation::complement() const {
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < num_sites_; ++i) {
    if (!contains(i)) rest.push_back(i);
  }
  return BasisOccupation(std::move(rest), num_sites_);
}

BasisOccupation BasisOccupation::with(std::size_t site) const {
  if (contains(site)) throw Error(ErrorCode::InvalidOccupation, "site already occupied");
  std::vector<std::size_t> s = sites_;
  s.insert(std::upper_bound(s.begin(), s.end(), site), site);
  return BasisOccupation(std::move(s), num_sites_);
}

BasisOccupation BasisOccupation::without(std::size_t site) const {
  std::vector<std::size_t> s;
  for (std::size_t x : sites_) {
    if (x != site) s.push_back(x);
  }
  return BasisOccupation(std::move(s), num_sites_);
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t c = 1;
  for (std::size_t j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

std::vector<BasisOccupation> sector_occupations(std::size_t num_sites, std::size_t m) {
  std::vector<BasisOccupation> out;
  if (m > num_sites) return out;
  out.reserve(binomial(num_sites, m));
  std::vector<std::size_t> idx(m);
  for (std::size_t k = 0; k < m; ++k) idx[k] = k;
  while (true) {
    out.emplace_back(idx, num_sites);
    // next combination in lexicographic order
    std::size_t k = m;
    while (k > 0 && idx[k - 1] == num_sites - m + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t j = k; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::string_view to_string(Axis axis) { return axis == Axis::Lambda ? "lambda" : "mu"; }

ChargeEigenvalues charge_eigenvalues(const GaudinModel& model, const LambdaState& lam) {
  if (lam.size() != model.size()) {
    throw Error(ErrorCode::LengthMismatch, "Lambda array length differs from N");
  }
  const double field = 2.0 / model.coupling();
  const double shift = lam.axis == Axis::Lambda ? field : -field;
  ChargeEigenvalues out;
  out.r.resize(model.size());
  for (std::size_t i = 0; i < model.size(); ++i) {
    out.r[i] = 0.5 * (-2.0 * lam.values[i] + shift + model.level_sum(i));
  }
  return out;
}

double hamiltonian_energy(std::span<const double> eta, const ChargeEigenvalues& r) {
  if (eta.size() != r.r.size()) {
    throw Error(ErrorCode::LengthMismatch, "eta and r have different lengths");
  }
  double e = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) e += eta[i] * r.r[i];
  return e;
}

}  // namespace gaudin
