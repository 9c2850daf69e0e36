#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "gaudin/determinants.hpp"
#include "gaudin/ed_oracle.hpp"
#include "gaudin/error.hpp"
#include "gaudin/lambda_solver.hpp"
#include "gaudin/rapidity.hpp"
#include "support.hpp"

using namespace gaudin;
using testing::rel_err;

namespace {

RapiditySet random_rapidities(std::mt19937_64& rng, std::size_t m, double spread) {
  std::uniform_real_distribution<double> re(-0.5, 1.5);
  std::uniform_real_distribution<double> im(-spread, spread);
  RapiditySet rap{{}, Axis::Lambda};
  for (std::size_t k = 0; k < m; ++k) rap.values.emplace_back(re(rng), im(rng));
  return rap;
}

std::vector<cplx> lambda_at_occupied(const GaudinModel& m, const BasisOccupation& occ, const RapiditySet& rap) {
  std::vector<double> levels;
  for (std::size_t s : occ.sites()) levels.push_back(m.epsilon(s));
  return lambda_at(m, levels, rap.values);
}

// Mu-axis Bethe vector prod_j C(mu_j)|up...up>, C(u) = sum_i S^-_i/(u - eps_i).
ed::StateVector apply_annihilation(const GaudinModel& m, const std::vector<cplx>& mus) {
  const Eigen::Index dim = Eigen::Index(1) << m.size();
  ed::StateVector v = ed::StateVector::Zero(dim);
  v(dim - 1) = 1.0;
  for (cplx u : mus) {
    ed::StateVector next = ed::StateVector::Zero(dim);
    for (Eigen::Index s = 0; s < dim; ++s) {
      if (v(s) == 0.0) continue;
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (s >> i & 1) next(s & ~(Eigen::Index(1) << i)) += v(s) / (u - m.epsilon(i));
      }
    }
    v = std::move(next);
  }
  return v;
}

ed::StateVector lambda_vector(const GaudinModel& m, const LambdaState& lam) {
  return testing::apply_creation(m, extract_rapidities(m, lam).values);
}

ed::StateVector mu_vector(const GaudinModel& m, const LambdaState& lam) {
  return apply_annihilation(m, extract_rapidities(m, transform_axis(m, lam)).values);
}

cplx bra_ket(const ed::StateVector& bra, const ed::StateVector& ket) {
  // bilinear: the dual of a Bethe vector is its transpose, not its conjugate
  return (bra.transpose() * ket)(0, 0);
}

}  // namespace

TEST_CASE("dense determinant") {
  CHECK(det(Eigen::MatrixXd(0, 0)) == 1.0);
  CHECK(det(Eigen::MatrixXd(Eigen::MatrixXd::Identity(3, 3))) == doctest::Approx(1.0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd a(6, 6);
    Eigen::MatrixXcd b(6, 6);
    for (Eigen::Index i = 0; i < 6; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) {
        a(i, j) = normal(rng);
        b(i, j) = cplx(normal(rng), normal(rng));
      }
    }
    CHECK(rel_err(det(a), testing::cofactor_det(a)) < 1e-12);
    CHECK(rel_err(det(b), testing::cofactor_det(b)) < 1e-12);
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(0, 1) = std::nan("");
  CHECK_THROWS_AS(det(bad), Error);
}

TEST_CASE("domain-wall partition function") {
  const GaudinModel m = new_model({0.0, 0.3, 0.55, 0.8, 1.0}, 0.5);
  const BasisOccupation none({}, 5);
  CHECK(partition_overlap_det(m, none, std::vector<cplx>{}) == cplx(1.0, 0.0));

  const BasisOccupation single({2}, 5);
  const RapiditySet one{{cplx(0.1, 0.7)}, Axis::Lambda};
  const cplx expected = 1.0 / (one.values[0] - m.epsilon(2));
  CHECK(rel_err(partition_overlap_det(m, single, lambda_at_occupied(m, single, one)), expected) < 1e-14);
  CHECK(rel_err(partition_overlap_perm(m, single, one), expected) < 1e-14);
  CHECK(rel_err(izergin_overlap(m, single, one), expected) < 1e-14);

  const GaudinModel two = new_model({0.0, 1.0}, 0.5);
  const BasisOccupation both({0, 1}, 2);
  const RapiditySet hand{{cplx(2.0, 0.0), cplx(0.0, 3.0)}, Axis::Lambda};
  const cplx l1 = hand.values[0];
  const cplx l2 = hand.values[1];
  const cplx by_hand = 1.0 / ((l1 - 0.0) * (l2 - 1.0)) + 1.0 / ((l1 - 1.0) * (l2 - 0.0));
  CHECK(rel_err(partition_overlap_perm(two, both, hand), by_hand) < 1e-14);
  CHECK(rel_err(partition_overlap_det(two, both, lambda_at_occupied(two, both, hand)), by_hand) < 1e-13);
  const RapiditySet swapped{{l2, l1}, Axis::Lambda};
  CHECK(rel_err(partition_overlap_perm(two, both, swapped), by_hand) < 1e-14);

  std::mt19937_64 rng(17);
  const BasisOccupation four({0, 1, 3, 4}, 5);
  const BasisOccupation all({0, 1, 2, 3, 4}, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const RapiditySet r4 = random_rapidities(rng, 4, 2.0);
    const cplx dw = partition_overlap_det(m, four, lambda_at_occupied(m, four, r4));
    CHECK(rel_err(dw, partition_overlap_perm(m, four, r4)) < 1e-11);
    CHECK(rel_err(dw, partition_overlap_rapidity_det(m, four, r4)) < 1e-9);
    const RapiditySet r5 = random_rapidities(rng, 5, 2.0);
    const cplx dw5 = partition_overlap_det(m, all, lambda_at_occupied(m, all, r5));
    CHECK(rel_err(dw5, izergin_overlap(m, all, r5)) < 1e-9);
  }

  // merged rapidities break the Izergin prefactor but not Det J
  const RapiditySet merged{{cplx(0.4, 0.2), cplx(0.4, 0.2)}, Axis::Lambda};
  const BasisOccupation pair({1, 3}, 5);
  CHECK_THROWS_AS(izergin_overlap(m, pair, merged), Error);
  CHECK(std::isfinite(std::abs(partition_overlap_det(m, pair, lambda_at_occupied(m, pair, merged)))));

  CHECK_THROWS_AS(partition_overlap_det(m, pair, std::vector<double>{1.0}), Error);
}

TEST_CASE("one-spin scalar products and norms") {
  const double g = 0.5;
  const GaudinModel m = new_model({0.2}, g);
  const LambdaState up_mu{{0.0}, Axis::Mu, 1, g};
  const LambdaState up_lambda{{2.0 / g}, Axis::Lambda, 1, g};
  CHECK(scalar_product_det(m, up_mu, up_lambda).value == doctest::Approx(-2.0 / g));
  CHECK(norm_product(m, up_lambda, up_mu) == doctest::Approx(-2.0 / g));

  const LambdaState down_lambda{{0.0}, Axis::Lambda, 0, g};
  const LambdaState down_mu{{-2.0 / g}, Axis::Mu, 0, g};
  CHECK(norm_product(m, down_lambda, down_mu) == doctest::Approx(2.0 / g));
  CHECK_THROWS_AS(norm_product(m, down_mu, down_lambda), Error);

  const Overlap mismatch = scalar_product_det(m, up_mu, down_lambda);
  CHECK(mismatch.sector_mismatch);
  CHECK(mismatch.value == 0.0);
}

TEST_CASE("scalar products against explicit vectors") {
  const double g = 0.45;
  const GaudinModel m = new_model(testing::spread_levels(6, 33), g);
  const SectorSolution s = solve_all_in_sector(m, 3);
  std::vector<ed::StateVector> lam_vecs;
  std::vector<ed::StateVector> mu_vecs;
  for (const LambdaState& lam : s.states) {
    lam_vecs.push_back(lambda_vector(m, lam));
    mu_vecs.push_back(mu_vector(m, lam));
  }
  for (std::size_t a = 0; a < s.states.size(); a += 4) {
    const LambdaState mu = transform_axis(m, s.states[a]);
    const double norm = norm_product(m, s.states[a], mu);
    CHECK(rel_err(norm, bra_ket(mu_vecs[a], lam_vecs[a])) < 1e-9);
    CHECK(rel_err(scalar_product_det(m, s.states[a], s.states[a]).value, norm) < 1e-12);
    for (std::size_t b = 0; b < s.states.size(); b += 3) {
      if (a == b) continue;
      const double overlap = scalar_product_det(m, mu, s.states[b]).value;
      const double scale = mu_vecs[a].norm() * lam_vecs[b].norm();
      CHECK(std::abs(overlap) < 1e-8 * scale);
    }
  }

  // neither side solves anything
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> re(-0.5, 1.5);
  std::uniform_real_distribution<double> im(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const cplx z(re(rng), im(rng));
    const std::vector<cplx> ket_rap{z, std::conj(z), cplx(re(rng), 0.0)};
    const cplx w(re(rng), im(rng));
    const std::vector<cplx> bra_rap{w, std::conj(w), cplx(re(rng), 0.0)};
    const LambdaState ket = lambda_from_rapidities(m, RapiditySet{ket_rap, Axis::Lambda});
    const LambdaState bra = lambda_from_rapidities(m, RapiditySet{bra_rap, Axis::Mu});
    const cplx expected = bra_ket(apply_annihilation(m, bra_rap), testing::apply_creation(m, ket_rap));
    CHECK(rel_err(scalar_product_det(m, bra, ket).value, expected) < 1e-9);
  }
}

TEST_CASE("S+ and Sz form factors against explicit vectors") {
  const double g = 0.6;
  const GaudinModel m = new_model(testing::spread_levels(4, 12), g);
  std::vector<SectorSolution> sectors;
  for (std::size_t k = 0; k <= 4; ++k) sectors.push_back(solve_all_in_sector(m, k));

  const std::size_t site_count = m.size();
  for (std::size_t k = 0; k < 4; ++k) {
    for (const LambdaState& ket : sectors[k].states) {
      const ed::StateVector ket_vec = lambda_vector(m, ket);
      for (const LambdaState& bra : sectors[k + 1].states) {
        const ed::StateVector bra_vec = mu_vector(m, bra);
        for (std::size_t i = 0; i < site_count; ++i) {
          const cplx expected = bra_ket(bra_vec, ed::apply_splus(ket_vec, i));
          const Overlap got = splus_form_factor(m, i, bra, ket);
          CHECK_FALSE(got.sector_mismatch);
          CHECK(std::abs(got.value - expected) <= 1e-9 * std::abs(expected) + 1e-12 * bra_vec.norm() * ket_vec.norm());
        }
      }
      for (const LambdaState& bra : sectors[k].states) {
        const ed::StateVector bra_vec = mu_vector(m, bra);
        for (std::size_t i = 0; i < site_count; ++i) {
          const cplx expected = bra_ket(bra_vec, ed::apply_sz(ket_vec, i));
          const double got = sz_form_factor(m, i, bra, ket).value;
          CHECK(std::abs(got - expected) <= 1e-9 * std::abs(expected) + 1e-12 * bra_vec.norm() * ket_vec.norm());
        }
      }
    }
  }
  CHECK(splus_form_factor(m, 0, sectors[2].states[0], sectors[2].states[1]).sector_mismatch);
  CHECK_THROWS_AS(splus_form_factor(m, 7, sectors[2].states[0], sectors[1].states[0]), Error);
}

TEST_CASE("one-spin form factors") {
  const double g = 0.5;
  const double eps = 0.2;
  const GaudinModel m = new_model({eps}, g);
  const LambdaState vacuum{{0.0}, Axis::Lambda, 0, g};
  const LambdaState up_mu{{0.0}, Axis::Mu, 1, g};
  CHECK(splus_form_factor(m, 0, up_mu, vacuum).value == doctest::Approx(1.0));

  const cplx lambda = eps - g / 2;
  const LambdaState up{{2.0 / g}, Axis::Lambda, 1, g};
  const RapiditySet rap{{lambda}, Axis::Lambda};
  // <up| S^z B(lambda) |down> = (1/2)/(lambda - eps)
  CHECK(sz_form_factor(m, 0, up_mu, up, &rap).value == doctest::Approx(0.5 / (lambda.real() - eps)));
  CHECK(sz_form_factor(m, 0, up_mu, up, &rap, -1).value != doctest::Approx(0.5 / (lambda.real() - eps)));
  CHECK_THROWS_AS(sz_form_factor(m, 0, up_mu, up, nullptr), Error);

  const LambdaState down_mu{{-2.0 / g}, Axis::Mu, 0, g};
  CHECK(sz_form_factor(m, 0, down_mu, vacuum, nullptr).value ==
        doctest::Approx(-0.5 * scalar_product_det(m, down_mu, vacuum).value));
}

TEST_CASE("normalized expectations") {
  const double g = 0.7;
  const GaudinModel m = new_model(testing::spread_levels(6, 2), g);
  const LambdaState vac{std::vector<double>(6, 0.0), Axis::Lambda, 0, g};
  const LambdaState full = solve_sector(m, BasisOccupation({0, 1, 2, 3, 4, 5}, 6));
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(normalized_expectation(m, SpinOp::Z, i, vac, transform_axis(m, vac)) == doctest::Approx(-0.5));
    CHECK(normalized_expectation(m, SpinOp::Z, i, full, transform_axis(m, full)) == doctest::Approx(0.5));
  }

  const std::vector<ed::SectorSpectrum> spectra = ed::spectrum_by_sector(m);
  const SectorSolution s = solve_all_in_sector(m, 2);
  for (std::size_t k = 0; k < s.states.size(); k += 2) {
    const ed::StateVector v = lambda_vector(m, s.states[k]);
    const LambdaState mu = transform_axis(m, s.states[k]);
    for (std::size_t i = 0; i < 6; ++i) {
      const double expected = (v.adjoint() * ed::apply_sz(v, i))(0, 0).real() / v.squaredNorm();
      const double got = normalized_expectation(m, SpinOp::Z, i, s.states[k], mu);
      CHECK(std::abs(got - expected) < 1e-9);
      CHECK(got >= -0.5 - 1e-12);
      CHECK(got <= 0.5 + 1e-12);
      CHECK(normalized_expectation(m, SpinOp::Plus, i, s.states[k], mu) == 0.0);
    }
  }
}
