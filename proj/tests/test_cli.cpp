#include <doctest.h>

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "commands.hpp"
#include "gaudin/ed_oracle.hpp"
#include "gaudin/io.hpp"
#include "gaudin/lambda_solver.hpp"
#include "gaudin/rapidity.hpp"
#include "support.hpp"

using namespace gaudin;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("gaudin-cli-" + std::to_string(::getpid()) + "-" +
                                       std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string file(const std::string& name, const std::string& text = "") const {
    const fs::path p = dir / name;
    if (!text.empty()) io::write_text(p, text);
    return p.string();
  }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

struct Row {
  std::size_t bra;
  std::size_t ket;
  double value;
  bool mismatch;
};

std::vector<Row> read_table(const std::string& path) {
  std::istringstream in(io::read_text(path));
  std::string line;
  std::getline(in, line);
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    rows.push_back({std::stoul(cells[0]), std::stoul(cells[1]), std::stod(cells[4]), cells[5] == "1"});
  }
  return rows;
}

const char* kModel4 = R"({"epsilons": [0.0, 0.31, 0.55, 1.0], "g": 0.6})";

}  // namespace

TEST_CASE("solve writes every state and a manifest") {
  Workspace ws;
  const std::string model = ws.file("m.json", kModel4);
  const std::string out = ws.file("s.json");
  const Run r = run({"solve", model, "--all", "--out", out});
  REQUIRE(r.code == 0);
  const GaudinModel m = io::parse_model(kModel4);
  CHECK(io::parse_solutions(m, io::read_text(out)).size() == 16);

  const auto manifest = nlohmann::json::parse(io::read_text(out + ".manifest.json"));
  CHECK(manifest["command"] == "solve");
  CHECK(manifest["inputs"][0] == model);
  CHECK(manifest["config_hash"].get<std::string>().size() == 16);

  // identical inputs give byte-identical outputs
  const std::string out2 = ws.file("s2.json");
  REQUIRE(run({"solve", model, "--all", "--out", out2}).code == 0);
  CHECK(io::read_text(out) == io::read_text(out2));
  CHECK(nlohmann::json::parse(io::read_text(out2 + ".manifest.json"))["config_hash"] == manifest["config_hash"]);

  const std::string one = ws.file("one.json");
  REQUIRE(run({"solve", model, "--sector", "2", "--out", one}).code == 0);
  CHECK(io::parse_solutions(m, io::read_text(one)).size() == 6);
}

TEST_CASE("solve rejects bad input") {
  Workspace ws;
  const std::string model = ws.file("m.json", kModel4);
  const std::string out = ws.file("s.json");
  CHECK(run({"solve", ws.file("bad.json", "{\"epsilons\": [0, 1"), "--all", "--out", out}).code == 1);
  CHECK(run({"solve", model, "--sector", "5", "--out", out}).code == 1);
  CHECK(run({"solve", model, "--out", out}).code == 1);
  CHECK(run({"solve", model, "--sector", "1", "--all", "--out", out}).code == 1);
  CHECK(run({"solve", ws.file("missing.json"), "--all", "--out", out}).code == 1);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  const Run version = run({"--version"});
  CHECK(version.code == 0);
  CHECK(version.out.find('.') != std::string::npos);
}

TEST_CASE("form factor tables match explicit vectors") {
  Workspace ws;
  const std::string model = ws.file("m.json", kModel4);
  const std::string sols = ws.file("s.json");
  REQUIRE(run({"solve", model, "--all", "--out", sols}).code == 0);

  const GaudinModel m = io::parse_model(kModel4);
  const std::vector<io::SolutionRecord> records = io::parse_solutions(m, io::read_text(sols));
  std::vector<ed::StateVector> lam_vecs;
  std::vector<ed::StateVector> mu_vecs;
  for (const io::SolutionRecord& r : records) {
    lam_vecs.push_back(testing::apply_creation(m, extract_rapidities(m, r.state).values));
    mu_vecs.push_back(ed::build_bethe_vector(m, extract_rapidities(m, transform_axis(m, r.state))));
  }
  auto bilinear = [](const ed::StateVector& a, const ed::StateVector& b) { return (a.transpose() * b)(0, 0); };

  for (const std::string op : {"sz", "sp", "sm"}) {
    for (std::size_t site : {0u, 2u}) {
      const std::string table = ws.file(op + std::to_string(site) + ".csv");
      const Run r = run({"formfactor", model, sols, "--op", op, "--site", std::to_string(site), "--out", table});
      REQUIRE(r.code == 0);
      const std::vector<Row> rows = read_table(table);
      CHECK(rows.size() == 256);
      for (const Row& row : rows) {
        const std::size_t mb = records[row.bra].state.sector_m;
        const std::size_t mk = records[row.ket].state.sector_m;
        const bool connected = op == "sz" ? mb == mk : op == "sp" ? mb == mk + 1 : mb + 1 == mk;
        CHECK(row.mismatch == !connected);
        if (!connected) {
          CHECK(row.value == 0.0);
          continue;
        }
        const ed::StateVector& vb = lam_vecs[row.bra];
        const ed::StateVector& vk = lam_vecs[row.ket];
        cplx expected;
        if (op == "sz") {
          expected = bilinear(vb, ed::apply_sz(vk, site)) / bilinear(vb, vb);
        } else if (op == "sp") {
          expected = bilinear(vb, ed::apply_splus(vk, site)) / bilinear(vb, vb);
        } else {
          expected = bilinear(mu_vecs[row.ket], ed::apply_splus(vb, site)) / bilinear(mu_vecs[row.bra], vb);
        }
        CHECK(std::abs(row.value - expected.real()) < 1e-9 * std::max(1.0, std::abs(expected)));
      }
      if (op == "sz") {
        // vacuum is the first record
        CHECK(rows[0].bra == 0);
        CHECK(rows[0].ket == 0);
        CHECK(rows[0].value == doctest::Approx(-0.5));
      } else {
        CHECK(r.err.find("sector_mismatch") != std::string::npos);
      }
    }
  }
}

TEST_CASE("form factors need the adjacent sector") {
  Workspace ws;
  const std::string model = ws.file("m.json", kModel4);
  const std::string sols = ws.file("s.json");
  REQUIRE(run({"solve", model, "--sector", "1", "--out", sols}).code == 0);
  CHECK(run({"formfactor", model, sols, "--op", "sp", "--site", "0", "--out", ws.file("t.csv")}).code == 1);
  CHECK(run({"formfactor", model, sols, "--op", "sz", "--site", "0", "--out", ws.file("t.csv")}).code == 0);
  CHECK(run({"formfactor", model, sols, "--op", "sz", "--site", "9", "--out", ws.file("t.csv")}).code == 1);
  CHECK(run({"formfactor", model, sols, "--op", "sx", "--site", "0", "--out", ws.file("t.csv")}).code == 1);
}

TEST_CASE("dynamics series") {
  Workspace ws;
  const std::string params = ws.file("d.json", R"({"B": 1.0, "A": [0.31, 0.47, 0.62, 0.83, 1.0],
      "alpha": [0.6, 0], "beta": [0, 0.8], "occupation": [1, 3],
      "times": {"start": 0, "stop": 10, "count": 21},
      "sampling": {"type": "monte_carlo", "count": 200, "seed": 5}})");
  const std::string a = ws.file("a.csv");
  const std::string b = ws.file("b.csv");
  REQUIRE(run({"dynamics", params, "--out", a}).code == 0);
  REQUIRE(run({"dynamics", params, "--out", b}).code == 0);
  CHECK(io::read_text(a) == io::read_text(b));

  const std::string exact = ws.file("exact.json", R"({"B": 1.0, "A": [0.31, 0.47, 0.62, 0.83, 1.0],
      "alpha": [0.6, 0], "beta": [0, 0.8], "occupation": [1, 3],
      "times": {"start": 0, "stop": 10, "count": 21}, "sampling": "full"})");
  const std::string c = ws.file("c.csv");
  REQUIRE(run({"dynamics", exact, "--out", c}).code == 0);
  std::istringstream in(io::read_text(c));
  std::string header;
  std::string first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "t,re,im");
  double t = 0;
  double re = 0;
  double im = 0;
  REQUIRE(std::sscanf(first.c_str(), "%lf,%lf,%lf", &t, &re, &im) == 3);
  CHECK(t == 0.0);
  CHECK(std::abs(re) < 1e-12);
  CHECK(im == doctest::Approx(0.48).epsilon(1e-10));

  CHECK(run({"dynamics", ws.file("bad.json", R"({"B": 0})"), "--out", c}).code == 1);
}

TEST_CASE("verify") {
  Workspace ws;
  const std::string model = ws.file("m.json", kModel4);
  const std::string manifest = ws.file("verify.json");
  const Run ok = run({"verify", model, "--level", "quick", "--manifest", manifest});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("[FAIL]") == std::string::npos);
  CHECK(ok.out.find("S^z sign determination") != std::string::npos);
  CHECK(nlohmann::json::parse(io::read_text(manifest))["command"] == "verify");

  const std::string sols = ws.file("s.json");
  REQUIRE(run({"solve", model, "--all", "--out", sols}).code == 0);
  CHECK(run({"verify", model, "--solutions", sols, "--manifest", manifest}).code == 0);

  auto doc = nlohmann::json::parse(io::read_text(sols));
  doc[5]["values"][0] = doc[5]["values"][0].get<double>() + 0.3;
  const std::string corrupted = ws.file("corrupt.json", doc.dump());
  const Run bad = run({"verify", model, "--solutions", corrupted, "--manifest", manifest});
  CHECK(bad.code == 2);
  CHECK(bad.out.find("corrupted") != std::string::npos);
  CHECK(run({"verify", model, "--solutions", ws.file("junk.json", "[{]"), "--manifest", manifest}).code == 2);
  CHECK(run({"verify", model, "--level", "slow", "--manifest", manifest}).code == 1);
}

TEST_CASE("verify skips the oracle checks above twelve spins") {
  Workspace ws;
  std::vector<double> eps;
  for (int i = 0; i < 13; ++i) eps.push_back(i / 12.0);
  const GaudinModel m(eps, 0.5);
  const std::string model = ws.file("m13.json", io::format_model(m));

  // two cheap sectors are enough to reach the oracle stage
  std::vector<io::SolutionRecord> records;
  for (std::size_t sector : {0u, 1u}) {
    const SectorSolution s = solve_all_in_sector(m, sector);
    for (std::size_t k = 0; k < s.states.size(); ++k) records.push_back({s.occupations[k], s.states[k], 0.0});
  }
  const std::string sols = ws.file("s13.json", io::format_solutions(records));
  const Run r = run({"verify", model, "--solutions", sols, "--manifest", ws.file("v.json")});
  CHECK(r.out.find("notice: N=13") != std::string::npos);
  CHECK(r.out.find("[SKIP] spectrum equivalence") != std::string::npos);
  CHECK(r.out.find("[SKIP] form factors") != std::string::npos);
}
