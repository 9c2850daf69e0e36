#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gaudin/ed_oracle.hpp"
#include "gaudin/error.hpp"
#include "gaudin/lambda_solver.hpp"
#include "gaudin/model.hpp"
#include "support.hpp"

using namespace gaudin;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("model validation") {
  const GaudinModel m = new_model({0.0, 1.0}, 0.5);
  CHECK(m.size() == 2);
  CHECK(m.omega() == 2);
  CHECK(m.span() == doctest::Approx(1.0));
  CHECK(m.level_sum(0) == doctest::Approx(-1.0));
  CHECK(m.level_sum(1) == doctest::Approx(1.0));

  CHECK(code_of([] { new_model({0.0, 0.0}, 0.5); }) == ErrorCode::DuplicateEpsilon);
  CHECK(code_of([] { new_model({1.0}, 0.0); }) == ErrorCode::ZeroCoupling);
  CHECK(code_of([] { new_model({}, 1.0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { new_model({0.0, std::nan("")}, 1.0); }) == ErrorCode::NonFinite);
  CHECK(code_of([] { new_model({0.0}, std::numeric_limits<double>::infinity()); }) == ErrorCode::NonFinite);
}

TEST_CASE("basis occupations") {
  CHECK(code_of([] { BasisOccupation({2, 1}, 4); }) == ErrorCode::InvalidOccupation);
  CHECK(code_of([] { BasisOccupation({4}, 4); }) == ErrorCode::InvalidOccupation);
  const BasisOccupation occ({0, 2}, 4);
  CHECK(occ.mask() == 0b0101);
  CHECK(BasisOccupation::from_mask(0b0101, 4) == occ);
  CHECK(occ.complement() == BasisOccupation({1, 3}, 4));
  CHECK(occ.with(1) == BasisOccupation({0, 1, 2}, 4));
  CHECK(occ.without(0) == BasisOccupation({2}, 4));
  for (std::size_t m = 0; m <= 6; ++m) CHECK(sector_occupations(6, m).size() == binomial(6, m));
  CHECK(binomial(12, 6) == 924);
}

TEST_CASE("one-spin charges") {
  const double g = 0.7;
  const GaudinModel m = new_model({0.3}, g);
  const LambdaState down{{0.0}, Axis::Lambda, 0, g};
  const LambdaState up{{2.0 / g}, Axis::Lambda, 1, g};
  CHECK(charge_eigenvalues(m, down).r[0] == doctest::Approx(1.0 / g));
  CHECK(charge_eigenvalues(m, up).r[0] == doctest::Approx(-1.0 / g));
  const LambdaState up_mu{{0.0}, Axis::Mu, 1, g};
  CHECK(charge_eigenvalues(m, up_mu).r[0] == doctest::Approx(-1.0 / g));
}

TEST_CASE("hamiltonian energy projections") {
  const ChargeEigenvalues r{{1.5, -2.0, 0.25}};
  const std::vector<double> first{1.0, 0.0, 0.0};
  const std::vector<double> zero{0.0, 0.0, 0.0};
  CHECK(hamiltonian_energy(first, r) == 1.5);
  CHECK(hamiltonian_energy(zero, r) == 0.0);
  const std::vector<double> short_eta{1.0};
  CHECK(code_of([&] { hamiltonian_energy(short_eta, r); }) == ErrorCode::LengthMismatch);
}

TEST_CASE("charges of a solved sector match exact diagonalization") {
  const GaudinModel m = new_model(testing::spread_levels(4, 7), 0.4);
  const std::vector<ed::SectorSpectrum> spectra = ed::spectrum_by_sector(m);
  for (std::size_t sector = 0; sector <= 4; ++sector) {
    const SectorSolution s = solve_all_in_sector(m, sector);
    std::vector<ChargeEigenvalues> mine;
    for (const LambdaState& lam : s.states) mine.push_back(charge_eigenvalues(m, lam));
    const ed::Matching match = ed::match_charges(mine, spectra[sector].charges);
    CHECK_FALSE(match.ambiguous);
    CHECK(match.worst < 1e-10);

    // trace rule: sum_i r_i = -(2/g)(M - N/2)
    for (const ChargeEigenvalues& r : mine) {
      double sum = 0.0;
      double biggest = 0.0;
      for (double x : r.r) {
        sum += x;
        biggest = std::max(biggest, std::abs(x));
      }
      CHECK(std::abs(sum + 2.0 / 0.4 * (double(sector) - 2.0)) < 1e-9 * biggest);
    }
  }
}
