#include <doctest.h>

#include <string>
#include <vector>

#include "gaudin/error.hpp"
#include "gaudin/io.hpp"
#include "gaudin/lambda_solver.hpp"

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

TEST_CASE("model files") {
  const GaudinModel m = io::parse_model(R"({"epsilons": [0.0, 0.25, 1.0], "g": -0.5})");
  CHECK(m.size() == 3);
  CHECK(m.coupling() == -0.5);
  const GaudinModel again = io::parse_model(io::format_model(m));
  CHECK(again.epsilon(1) == 0.25);

  CHECK(code_of([] { io::parse_model("{\"epsilons\": [0.0, 1.0"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::parse_model(R"({"epsilons": [0.0, NaN], "g": 1})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::parse_model(R"({"epsilons": [0.0, 1e999], "g": 1})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::parse_model(R"({"epsilons": [0.0, "a"], "g": 1})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::parse_model(R"({"epsilons": [0.0, 1.0]})"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { io::parse_model(R"({"epsilons": [0.0, 0.0], "g": 1})"); }) == ErrorCode::DuplicateEpsilon);
  CHECK(code_of([] { io::parse_model(R"({"epsilons": [0.0, 1.0], "g": 0})"); }) == ErrorCode::ZeroCoupling);
}

TEST_CASE("solutions round trip exactly") {
  const GaudinModel m = io::parse_model(R"({"epsilons": [0.0, 0.31, 0.55, 1.0], "g": 0.7})");
  const SectorSolution s = solve_all_in_sector(m, 2);
  std::vector<io::SolutionRecord> records;
  for (std::size_t k = 0; k < s.states.size(); ++k) {
    records.push_back({s.occupations[k], s.states[k], residual_inf_norm(m, s.states[k])});
  }
  const std::string text = io::format_solutions(records);
  const std::vector<io::SolutionRecord> parsed = io::parse_solutions(m, text);
  REQUIRE(parsed.size() == records.size());
  for (std::size_t k = 0; k < parsed.size(); ++k) {
    CHECK(parsed[k].occupation == records[k].occupation);
    CHECK(parsed[k].state.values == records[k].state.values);
    CHECK(parsed[k].state.sector_m == 2);
    CHECK(parsed[k].state.axis == Axis::Lambda);
  }
  CHECK(io::format_solutions(parsed) == text);

  CHECK(code_of([&] { io::parse_solutions(m, R"([{"occupation": [0], "M": 2, "axis": "lambda",
      "values": [0, 0, 0, 0], "residual_inf": 0}])"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { io::parse_solutions(m, R"([{"occupation": [0], "M": 1, "axis": "sideways",
      "values": [0, 0, 0, 0], "residual_inf": 0}])"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { io::parse_solutions(m, R"([{"occupation": [0], "M": 1, "axis": "lambda",
      "values": [0, 0], "residual_inf": 0}])"); }) == ErrorCode::ParseError);
  CHECK(code_of([&] { io::parse_solutions(m, R"({"occupation": []})"); }) == ErrorCode::ParseError);
}

TEST_CASE("rapidity files") {
  const RapiditySet rap{{cplx(0.5, 1.25), cplx(0.5, -1.25), cplx(-3.0, 0.0)}, Axis::Lambda};
  const RapiditySet back = io::parse_rapidities(io::format_rapidities(rap), Axis::Lambda);
  CHECK(back.values == rap.values);
  CHECK(code_of([] { io::parse_rapidities("[[1.0]]", Axis::Lambda); }) == ErrorCode::ParseError);
}

TEST_CASE("dynamics input") {
  const io::DynamicsInput in = io::parse_dynamics_input(R"({"B": 1.5, "A": [0.3, 0.6],
      "alpha": [0.6, 0], "beta": [0, 0.8], "occupation": [1],
      "times": {"start": 0, "stop": 2, "count": 5},
      "sampling": {"type": "monte_carlo", "count": 100, "seed": 7}})");
  CHECK(in.params.field == 1.5);
  CHECK(in.params.bath_occupation == BasisOccupation({1}, 2));
  CHECK(in.params.beta == cplx(0.0, 0.8));
  CHECK(in.t_count == 5);
  const auto* mc = std::get_if<MonteCarloSampling>(&in.sampling);
  REQUIRE(mc != nullptr);
  CHECK(mc->count == 100);
  CHECK(mc->seed == 7);

  CHECK(code_of([] {
          io::parse_dynamics_input(R"({"B": 1, "A": [0.3], "alpha": [1, 0], "beta": [1, 0],
              "occupation": [], "times": {"start": 0, "stop": 1, "count": 2}})");
        }) == ErrorCode::ParseError);
  CHECK(code_of([] {
          io::parse_dynamics_input(R"({"B": 1, "A": [0.3], "alpha": [1, 0], "beta": [0, 0],
              "occupation": [3], "times": {"start": 0, "stop": 1, "count": 2}})");
        }) == ErrorCode::ParseError);
}

TEST_CASE("tables") {
  TimeSeries s;
  s.times = {0.0, 0.5};
  s.values = {cplx(0.48, 0.0), cplx(0.1, -0.2)};
  CHECK(io::format_time_series(s) == "t,re,im\n0,0.48,0\n0.5,0.1,-0.2\n");

  const std::vector<io::FormFactorRow> rows{{0, 1, 2, "sp", 0.0, true}, {3, 4, 2, "sp", -1.5, false}};
  CHECK(io::format_form_factor_table(rows) ==
        "bra_id,ket_id,site,operator,value,sector_mismatch\n0,1,2,sp,0,1\n3,4,2,sp,-1.5,0\n");
  CHECK(io::format_double(0.1) == "0.1");
}
