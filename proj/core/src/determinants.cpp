#include "gaudin/determinants.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "gaudin/error.hpp"

namespace gaudin {

namespace {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Determinants built from Lambda values can be tiny next to their entries,
// so their entries and elimination use quad precision.
__extension__ typedef __float128 wide;
using wide_cplx = std::complex<wide>;

template <class Scalar>
struct Widened {
  using type = wide;
};
template <>
struct Widened<cplx> {
  using type = wide_cplx;
};

wide widen(double x) { return x; }
wide_cplx widen(cplx z) { return {z.real(), z.imag()}; }
double narrow(wide x) { return static_cast<double>(x); }
cplx narrow(const wide_cplx& z) { return {static_cast<double>(z.real()), static_cast<double>(z.imag())}; }

wide magnitude(wide x) { return x < 0 ? -x : x; }
wide magnitude(const wide_cplx& z) { return magnitude(z.real()) + magnitude(z.imag()); }
wide reciprocal(wide x) { return 1 / x; }
wide_cplx reciprocal(const wide_cplx& z) {
  const wide n = z.real() * z.real() + z.imag() * z.imag();
  return {z.real() / n, -z.imag() / n};
}

// Gaussian elimination with partial pivoting on a row-major n x n array.
template <class W>
W elimination_det(std::vector<W>& a, std::size_t n) {
  W det = W(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    wide best = magnitude(a[c * n + c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const wide m = magnitude(a[r * n + c]);
      if (m > best) {
        best = m;
        pivot = r;
      }
    }
    if (best == 0) return W(0);
    if (pivot != c) {
      for (std::size_t k = c; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      det = -det;
    }
    det = det * a[c * n + c];
    const W inv = reciprocal(a[c * n + c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const W f = a[r * n + c] * inv;
      for (std::size_t k = c + 1; k < n; ++k) a[r * n + k] = a[r * n + k] - f * a[c * n + k];
    }
  }
  return det;
}

// Domain-wall determinant over `sites`: diagonal sum_{c != a} 1/(eps_a - eps_c)
// minus total[a], off-diagonal 1/(eps_a - eps_b). `total` is indexed like
// `sites`.
template <class W>
W domain_wall_det(const GaudinModel& model, std::span<const std::size_t> sites,
                  const std::vector<W>& total) {
  const std::size_t n = sites.size();
  if (n == 0) return W(1);
  std::vector<W> a(n * n);
  for (std::size_t r = 0; r < n; ++r) {
    const wide er = model.epsilon(sites[r]);
    wide diag = 0;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == r) continue;
      const wide w = 1 / (er - static_cast<wide>(model.epsilon(sites[c])));
      a[r * n + c] = W(w);
      diag += w;
    }
    a[r * n + r] = W(diag) - total[r];
  }
  return elimination_det(a, n);
}

void require_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
  }
}

void require_finite(std::span<const cplx> v) {
  for (const cplx& x : v) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
    }
  }
}

template <class Derived>
auto lu_det(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw Error(ErrorCode::InvalidArgument, "determinant of a non-square matrix");
  if (m.size() == 0) return Scalar(1);
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");
  return m.partialPivLu().determinant();
}

// Domain-wall matrix over `sites`: diagonal sum_{c != a} 1/(eps_a - eps_c)
// minus the supplied Lambda total, off-diagonal 1/(eps_a - eps_b).
template <class Scalar>
Matrix<Scalar> domain_wall_matrix(const GaudinModel& model, std::span<const std::size_t> sites,
                                  std::span<const Scalar> lambda_total) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  Matrix<Scalar> m(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    const double ea = model.epsilon(sites[static_cast<std::size_t>(a)]);
    double diag = 0.0;
    for (Eigen::Index b = 0; b < n; ++b) {
      if (b == a) continue;
      const double w = 1.0 / (ea - model.epsilon(sites[static_cast<std::size_t>(b)]));
      m(a, b) = w;
      diag += w;
    }
    m(a, a) = Scalar(diag) - lambda_total[static_cast<std::size_t>(a)];
  }
  return m;
}

// Hadamard bound: product of row 1-norms; the natural magnitude of a
// determinant used to judge when it vanishes.
template <class Scalar>
double hadamard_bound(const Matrix<Scalar>& m) {
  double bound = 1.0;
  for (Eigen::Index a = 0; a < m.rows(); ++a) bound *= m.row(a).cwiseAbs().sum();
  return bound;
}

std::vector<std::size_t> all_sites_except(std::size_t n, std::optional<std::size_t> skip) {
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!skip || *skip != i) out.push_back(i);
  }
  return out;
}

void require_length(const GaudinModel& model, const LambdaState& s, const char* what) {
  if (s.size() != model.size()) {
    throw Error(ErrorCode::LengthMismatch, std::string(what) + " Lambda array length differs from N");
  }
}

// Lambda^{mu'} of the bra: a Mu-axis bra is used as is, a Lambda-axis bra is
// an eigenstate moved to the other axis.
std::vector<wide> bra_mu_values(const GaudinModel& model, const LambdaState& bra) {
  require_finite(bra.values);
  const wide shift = bra.axis == Axis::Lambda ? 2 / static_cast<wide>(model.coupling()) : wide(0);
  std::vector<wide> out(bra.values.size());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = static_cast<wide>(bra.values[a]) - shift;
  return out;
}

void require_lambda_ket(const LambdaState& ket) {
  if (ket.axis != Axis::Lambda) {
    throw Error(ErrorCode::AxisMismatch, "ket must be written on the Lambda axis");
  }
}

// <mu'|S^+_site|ket> with complex ket Lambda values; the bra enters as its
// Mu-axis values.
template <class Scalar>
Scalar splus_det(const GaudinModel& model, std::size_t site, const std::vector<wide>& bra_mu,
                 std::span<const Scalar> ket) {
  require_finite(ket);
  const std::vector<std::size_t> sites = all_sites_except(model.size(), site);
  std::vector<typename Widened<Scalar>::type> total(sites.size());
  for (std::size_t a = 0; a < sites.size(); ++a) {
    total[a] = widen(ket[sites[a]]) + bra_mu[sites[a]];
  }
  return narrow(domain_wall_det(model, sites, total));
}

template <class Scalar>
Scalar occupation_det(const GaudinModel& model, const BasisOccupation& occ,
                      std::span<const Scalar> lambda_at_occ) {
  if (lambda_at_occ.size() != occ.size()) {
    throw Error(ErrorCode::LengthMismatch, "need one Lambda value per occupied level");
  }
  require_finite(lambda_at_occ);
  std::vector<typename Widened<Scalar>::type> total(occ.size());
  for (std::size_t a = 0; a < total.size(); ++a) total[a] = widen(lambda_at_occ[a]);
  return narrow(domain_wall_det(model, occ.sites(), total));
}

void check_distinct(std::span<const cplx> values, double guard, const char* what) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      if (std::abs(values[i] - values[j]) <= guard) {
        throw Error(ErrorCode::CoincidingRapidities, std::string(what) + " " + std::to_string(i) +
                                                         " and " + std::to_string(j) +
                                                         " coincide");
      }
    }
  }
}

}  // namespace

double det(const Eigen::MatrixXd& m) { return lu_det(m); }
cplx det(const Eigen::MatrixXcd& m) { return lu_det(m); }

cplx partition_overlap_det(const GaudinModel& model, const BasisOccupation& occ,
                           std::span<const cplx> lambda_at_occ) {
  return occupation_det<cplx>(model, occ, lambda_at_occ);
}

double partition_overlap_det(const GaudinModel& model, const BasisOccupation& occ,
                             std::span<const double> lambda_at_occ) {
  return occupation_det<double>(model, occ, lambda_at_occ);
}

cplx partition_overlap_perm(const GaudinModel& model, const BasisOccupation& occ,
                            const RapiditySet& rap) {
  const std::size_t m = occ.size();
  if (rap.size() != m) throw Error(ErrorCode::LengthMismatch, "need M rapidities for M levels");
  if (m > 9) throw Error(ErrorCode::TooLarge, "permutation sum is limited to M <= 9");
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  cplx sum = 0.0;
  do {
    cplx term = 1.0;
    for (std::size_t i = 0; i < m; ++i) term /= rap.values[i] - model.epsilon(occ[perm[i]]);
    sum += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return sum;
}

cplx izergin_overlap(const GaudinModel& model, const BasisOccupation& occ,
                     const RapiditySet& rap) {
  const std::size_t m = occ.size();
  if (rap.size() != m) throw Error(ErrorCode::LengthMismatch, "need M rapidities for M levels");
  check_distinct(rap.values, 1e-10 * std::max(model.span(), 1.0), "rapidities");

  // squared Cauchy entries make Det K badly conditioned for clustered rapidities
  std::vector<wide_cplx> lam(m);
  std::vector<wide> eps(m);
  for (std::size_t j = 0; j < m; ++j) {
    lam[j] = widen(rap.values[j]);
    eps[j] = model.epsilon(occ[j]);
  }
  wide_cplx num = 1;
  wide_cplx den = 1;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) num = num * (lam[j] - eps[k]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < i; ++j) den = den * (lam[i] - lam[j]);
  }
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j + 1; k < m; ++k) den = den * wide_cplx(eps[j] - eps[k]);
  }

  std::vector<wide_cplx> k(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      const wide_cplx d = wide_cplx(eps[b]) - lam[a];
      k[a * m + b] = reciprocal(d * d);
    }
  }
  return narrow(num * reciprocal(den) * elimination_det(k, m));
}

cplx partition_overlap_rapidity_det(const GaudinModel& model, const BasisOccupation& occ,
                                    const RapiditySet& rap) {
  const std::size_t m = occ.size();
  if (rap.size() != m) throw Error(ErrorCode::LengthMismatch, "need M rapidities for M levels");
  check_distinct(rap.values, 1e-10 * std::max(model.span(), 1.0), "rapidities");
  Eigen::MatrixXcd j(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < m; ++a) {
    cplx diag = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      diag += 1.0 / (rap.values[a] - model.epsilon(occ[c]));
      if (c == a) continue;
      const cplx w = -1.0 / (rap.values[a] - rap.values[c]);
      j(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c)) = w;
      diag += w;
    }
    j(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) = diag;
  }
  return lu_det(j);
}

Overlap scalar_product_det(const GaudinModel& model, const LambdaState& bra,
                           const LambdaState& ket) {
  require_length(model, bra, "bra");
  require_length(model, ket, "ket");
  require_lambda_ket(ket);
  if (bra.sector_m != ket.sector_m) return {0.0, true};
  require_finite(ket.values);
  const std::vector<wide> mu = bra_mu_values(model, bra);
  std::vector<wide> total(model.size());
  for (std::size_t a = 0; a < total.size(); ++a) total[a] = static_cast<wide>(ket.values[a]) + mu[a];
  const std::vector<std::size_t> sites = all_sites_except(model.size(), std::nullopt);
  return {narrow(domain_wall_det(model, sites, total)), false};
}

double norm_product(const GaudinModel& model, const LambdaState& lam, const LambdaState& mu) {
  if (lam.axis != Axis::Lambda || mu.axis != Axis::Mu) {
    throw Error(ErrorCode::AxisMismatch, "norm product needs a Lambda-axis and a Mu-axis state");
  }
  if (lam.sector_m != mu.sector_m) {
    throw Error(ErrorCode::AxisMismatch, "the two representations belong to different sectors");
  }
  return scalar_product_det(model, mu, lam).value;
}

Overlap splus_form_factor(const GaudinModel& model, std::size_t site, const LambdaState& bra,
                          const LambdaState& ket) {
  require_length(model, bra, "bra");
  require_length(model, ket, "ket");
  require_lambda_ket(ket);
  if (site >= model.size()) throw Error(ErrorCode::SiteOutOfRange, "site " + std::to_string(site));
  if (bra.sector_m != ket.sector_m + 1) return {0.0, true};
  return {splus_det<double>(model, site, bra_mu_values(model, bra), ket.values), false};
}

Overlap sminus_form_factor(const GaudinModel& model, std::size_t site,
                           const LambdaState& bra_lambda, const LambdaState& ket_mu) {
  // <lambda|S^-_i|mu'> = <mu'|S^+_i|lambda>^*, real for conjugate-closed sets
  return splus_form_factor(model, site, ket_mu, bra_lambda);
}

Overlap sz_form_factor(const GaudinModel& model, std::size_t site, const LambdaState& bra,
                       const LambdaState& ket, const RapiditySet* ket_rapidities,
                       int coefficient_sign) {
  require_length(model, bra, "bra");
  require_length(model, ket, "ket");
  require_lambda_ket(ket);
  if (site >= model.size()) throw Error(ErrorCode::SiteOutOfRange, "site " + std::to_string(site));
  if (bra.sector_m != ket.sector_m) return {0.0, true};

  const double overlap = scalar_product_det(model, bra, ket).value;
  if (ket.sector_m == 0) return {-0.5 * overlap, false};
  if (ket_rapidities == nullptr) {
    throw Error(ErrorCode::RapiditiesRequired, "S^z form factor needs the ket rapidities");
  }
  if (ket_rapidities->size() != ket.sector_m || ket_rapidities->axis != Axis::Lambda) {
    throw Error(ErrorCode::RapiditiesRequired, "ket rapidities do not match the ket sector");
  }

  const std::vector<wide> mu = bra_mu_values(model, bra);
  const double eps_i = model.epsilon(site);
  cplx sum = 0.0;
  std::vector<cplx> reduced(model.size());
  for (const cplx& lj : ket_rapidities->values) {
    for (std::size_t a = 0; a < model.size(); ++a) {
      reduced[a] = ket.values[a] - 1.0 / (model.epsilon(a) - lj);
    }
    const cplx coefficient = static_cast<double>(coefficient_sign) / (lj - eps_i);
    sum += coefficient * splus_det<cplx>(model, site, mu, reduced);
  }
  return {-0.5 * overlap + sum.real(), false};
}

Overlap sz_form_factor(const GaudinModel& model, std::size_t site, const LambdaState& bra,
                       const LambdaState& ket) {
  if (ket.sector_m == 0 || bra.sector_m != ket.sector_m) {
    return sz_form_factor(model, site, bra, ket, nullptr);
  }
  const RapiditySet rap = extract_rapidities(model, ket);
  return sz_form_factor(model, site, bra, ket, &rap);
}

double normalized_expectation(const GaudinModel& model, SpinOp op, std::size_t site,
                              const LambdaState& lam, const LambdaState& mu) {
  if (lam.axis != Axis::Lambda || mu.axis != Axis::Mu) {
    throw Error(ErrorCode::AxisMismatch, "expectation needs a Lambda-axis and a Mu-axis state");
  }
  require_length(model, lam, "ket");
  require_length(model, mu, "bra");
  if (site >= model.size()) throw Error(ErrorCode::SiteOutOfRange, "site " + std::to_string(site));

  std::vector<double> total(model.size());
  for (std::size_t a = 0; a < total.size(); ++a) total[a] = lam.values[a] + mu.values[a];
  const Eigen::MatrixXd g =
      domain_wall_matrix<double>(model, all_sites_except(model.size(), std::nullopt), total);
  const double denominator = lu_det(g);
  if (std::abs(denominator) < 1e-12 * hadamard_bound<double>(g)) {
    throw Error(ErrorCode::ZeroOverlap, "<mu|lambda> vanishes for this pair");
  }
  switch (op) {
    case SpinOp::Plus:
    case SpinOp::Minus:
      // fixed magnetization: S^+- change the sector
      return 0.0;
    case SpinOp::Z:
      return sz_form_factor(model, site, mu, lam).value / denominator;
  }
  return 0.0;
}

}  // namespace gaudin
