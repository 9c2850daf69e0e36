#include "commands.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>

#include <CLI11.hpp>

#include "gaudin/determinants.hpp"
#include "gaudin/dynamics.hpp"
#include "gaudin/ed_oracle.hpp"
#include "gaudin/io.hpp"
#include "gaudin/lambda_solver.hpp"
#include "gaudin/rapidity.hpp"
#include "gaudin/verification.hpp"
#include "manifest.hpp"

#ifndef GAUDIN_VERSION
#define GAUDIN_VERSION "0.0.0"
#endif

namespace gaudin::cli {

namespace {

using Clock = std::chrono::steady_clock;
namespace fs = std::filesystem;

constexpr std::uint64_t kVerifySeed = 20240611;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

fs::path manifest_path(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

void write_manifest(const fs::path& path, RunManifest m, Clock::time_point start) {
  m.version = GAUDIN_VERSION;
  m.wall_seconds = seconds_since(start);
  io::write_text(path, format_manifest(m));
}

// States of a solutions file, validated and moved to the Lambda axis,
// grouped into sectors 0..N.
std::vector<SectorSolution> load_sectors(const GaudinModel& model, const std::string& text) {
  const std::vector<io::SolutionRecord> records = io::parse_solutions(model, text);
  std::vector<SectorSolution> sectors(model.size() + 1);
  for (std::size_t m = 0; m < sectors.size(); ++m) sectors[m].sector_m = m;
  for (const io::SolutionRecord& r : records) {
    LambdaState state = r.state;
    state.g = model.coupling();
    // transform_axis rejects anything that does not solve its system
    LambdaState other = transform_axis(model, state);
    if (state.axis == Axis::Mu) state = std::move(other);
    SectorSolution& s = sectors[state.sector_m];
    s.occupations.push_back(r.occupation);
    s.states.push_back(std::move(state));
  }
  for (SectorSolution& s : sectors) s.collisions = find_collisions(s.states);
  return sectors;
}

double formfactor_value(const GaudinModel& model, const std::string& op, std::size_t site,
                        const LambdaState& bra, const LambdaState& ket, const RapiditySet* ket_rap,
                        double bra_norm) {
  if (op == "sz") return sz_form_factor(model, site, bra, ket, ket_rap).value / bra_norm;
  if (op == "sp") return splus_form_factor(model, site, bra, ket).value / bra_norm;
  // S^- coefficient in the mu representation: <mu_ket|S^+|lambda_bra> / <mu_bra|lambda_bra>
  return splus_form_factor(model, site, ket, bra).value / bra_norm;
}

bool connects(const std::string& op, std::size_t bra_m, std::size_t ket_m) {
  if (op == "sz") return bra_m == ket_m;
  if (op == "sp") return bra_m == ket_m + 1;
  return bra_m + 1 == ket_m;
}

verify::CheckResult guarded(const std::string& name, const std::function<verify::CheckResult()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    verify::CheckResult r;
    r.name = name;
    r.passed = false;
    r.worst = std::nan("");
    r.detail = e.what();
    return r;
  }
}

verify::CheckResult skipped(const std::string& name, std::size_t n) {
  verify::CheckResult r;
  r.name = name;
  r.passed = true;
  r.skipped = true;
  r.detail = "N=" + std::to_string(n) + " exceeds the exact-diagonalization limit of " +
             std::to_string(ed::kMaxSpins);
  return r;
}

CentralSpinParams reference_central_spin(std::size_t bath) {
  static constexpr std::array<double, 5> kCouplings{0.31, 0.47, 0.62, 0.83, 1.0};
  CentralSpinParams p;
  p.field = 1.0;
  p.couplings.assign(kCouplings.begin(), kCouplings.begin() + static_cast<std::ptrdiff_t>(bath));
  p.alpha = cplx(0.6, 0.0);
  p.beta = cplx(0.0, 0.8);
  p.bath_occupation = BasisOccupation({1}, bath);
  if (bath >= 5) p.bath_occupation = BasisOccupation({1, 3}, bath);
  return p;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::DuplicateEpsilon:
    case ErrorCode::ZeroCoupling:
    case ErrorCode::NonFinite:
    case ErrorCode::LengthMismatch:
    case ErrorCode::InvalidOccupation:
    case ErrorCode::SiteOutOfRange:
    case ErrorCode::ZeroField:
    case ErrorCode::DegenerateCouplings:
    case ErrorCode::IncompleteSector:
    case ErrorCode::ParseError:
    case ErrorCode::AxisMismatch:
    case ErrorCode::TooLarge:
      return kInputError;
    case ErrorCode::NoConvergence:
    case ErrorCode::NotAnEigenstate:
    case ErrorCode::SectorInference:
    case ErrorCode::RapidityOnLevel:
    case ErrorCode::NonRealLambda:
    case ErrorCode::CoincidingRapidities:
    case ErrorCode::IllConditioned:
    case ErrorCode::PolishDiverged:
    case ErrorCode::PoleEvaluation:
    case ErrorCode::ZeroOverlap:
    case ErrorCode::DegenerateGeneric:
    case ErrorCode::EmptyTable:
      return kNumericalFailure;
    case ErrorCode::RapiditiesRequired:
      return kInternalError;
  }
  return kInternalError;
}

int cmd_solve(const SolveOptions& opt, std::ostream& log) {
  const auto start = Clock::now();
  const std::string text = io::read_text(opt.model);
  const GaudinModel model = io::parse_model(text);
  if (opt.all == opt.sector.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --sector M or --all");
  }
  if (opt.sector && *opt.sector > model.size()) {
    throw Error(ErrorCode::InvalidArgument, "--sector " + std::to_string(*opt.sector) +
                                                " exceeds N = " + std::to_string(model.size()));
  }
  std::vector<std::size_t> sectors;
  if (opt.sector) {
    sectors.push_back(*opt.sector);
  } else {
    for (std::size_t m = 0; m <= model.size(); ++m) sectors.push_back(m);
  }

  std::vector<io::SolutionRecord> records;
  for (std::size_t m : sectors) {
    const SectorSolution s = solve_all_in_sector(model, m);
    if (!s.collisions.empty()) {
      throw Error(ErrorCode::NoConvergence, "sector " + std::to_string(m) + ": " +
                                                std::to_string(s.collisions.size()) +
                                                " pairs of occupations converged to the same state");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < s.states.size(); ++k) {
      io::SolutionRecord r{s.occupations[k], s.states[k], residual_inf_norm(model, s.states[k])};
      worst = std::max(worst, r.residual_inf);
      records.push_back(std::move(r));
    }
    log << "sector " << m << ": " << s.states.size() << " states, max residual " << worst << "\n";
  }
  io::write_text(opt.out, io::format_solutions(records));
  log << "wrote " << records.size() << " states to " << opt.out.string() << "\n";

  const std::string scope = opt.all ? "all" : "sector=" + std::to_string(*opt.sector);
  write_manifest(manifest_path(opt.out),
                 {"solve", {opt.model.string()}, {opt.out.string()}, config_hash({"solve", scope, text}), "", 0.0},
                 start);
  return kOk;
}

int cmd_formfactor(const FormFactorOptions& opt, std::ostream& log, std::ostream& warn) {
  const auto start = Clock::now();
  if (opt.op != "sz" && opt.op != "sp" && opt.op != "sm") {
    throw Error(ErrorCode::InvalidArgument, "--op must be sz, sp or sm");
  }
  const std::string model_text = io::read_text(opt.model);
  const std::string solutions_text = io::read_text(opt.solutions);
  const GaudinModel model = io::parse_model(model_text);
  if (opt.site >= model.size()) {
    throw Error(ErrorCode::SiteOutOfRange,
                "--site " + std::to_string(opt.site) + " is outside 0.." + std::to_string(model.size() - 1));
  }
  const std::vector<SectorSolution> sectors = load_sectors(model, solutions_text);

  // file order ids
  struct Entry {
    const LambdaState* state;
    std::size_t id;
  };
  std::vector<Entry> entries;
  {
    std::size_t id = 0;
    std::vector<std::size_t> next(sectors.size(), 0);
    for (const io::SolutionRecord& r : io::parse_solutions(model, solutions_text)) {
      entries.push_back({&sectors[r.state.sector_m].states[next[r.state.sector_m]++], id++});
    }
  }
  if (entries.empty()) throw Error(ErrorCode::IncompleteSector, "solutions file holds no states");

  for (const Entry& ket : entries) {
    const std::size_t m = ket.state->sector_m;
    const bool has_target = opt.op == "sz" || (opt.op == "sp" && m == model.size()) ||
                            (opt.op == "sm" && m == 0);
    if (has_target) continue;
    const std::size_t target = opt.op == "sp" ? m + 1 : m - 1;
    if (sectors[target].states.empty()) {
      throw Error(ErrorCode::IncompleteSector, "--op " + opt.op + " on sector " + std::to_string(m) +
                                                   " needs sector " + std::to_string(target) +
                                                   ", which the solutions file lacks");
    }
  }

  std::map<std::size_t, double> norms;
  std::map<std::size_t, RapiditySet> rapidities;
  std::vector<io::FormFactorRow> rows;
  std::size_t flagged = 0;
  for (const Entry& bra : entries) {
    for (const Entry& ket : entries) {
      io::FormFactorRow row{bra.id, ket.id, opt.site, opt.op, 0.0, false};
      if (!connects(opt.op, bra.state->sector_m, ket.state->sector_m)) {
        row.sector_mismatch = true;
        ++flagged;
        rows.push_back(row);
        continue;
      }
      if (!norms.count(bra.id)) {
        const double norm = scalar_product_det(model, *bra.state, *bra.state).value;
        if (norm == 0.0 || !std::isfinite(norm)) {
          throw Error(ErrorCode::ZeroOverlap, "state " + std::to_string(bra.id) + " has a vanishing norm");
        }
        norms[bra.id] = norm;
      }
      const RapiditySet* rap = nullptr;
      if (opt.op == "sz" && ket.state->sector_m > 0) {
        auto it = rapidities.find(ket.id);
        if (it == rapidities.end()) it = rapidities.emplace(ket.id, extract_rapidities(model, *ket.state)).first;
        rap = &it->second;
      }
      row.value = formfactor_value(model, opt.op, opt.site, *bra.state, *ket.state, rap, norms[bra.id]);
      rows.push_back(row);
    }
  }
  if (flagged > 0) {
    warn << "warning: " << flagged << " of " << rows.size() << " rows pair sectors that " << opt.op
         << " cannot connect; they are written as 0 with sector_mismatch=1\n";
  }
  io::write_text(opt.out, io::format_form_factor_table(rows));
  log << "wrote " << rows.size() << " rows to " << opt.out.string() << "\n";
  write_manifest(manifest_path(opt.out),
                 {"formfactor",
                  {opt.model.string(), opt.solutions.string()},
                  {opt.out.string()},
                  config_hash({"formfactor", opt.op, std::to_string(opt.site), model_text, solutions_text}),
                  "",
                  0.0},
                 start);
  return kOk;
}

int cmd_dynamics(const DynamicsOptions& opt, std::ostream& log) {
  const auto start = Clock::now();
  const std::string text = io::read_text(opt.params);
  const io::DynamicsInput in = io::parse_dynamics_input(text);
  const SpectralTable table = central_spin_table(in.params);
  log << "spectral table: " << table.rows.size() << " rows, completeness " << table.completeness_lower
      << " / " << table.completeness_upper << "\n";
  const std::vector<double> times = time_grid(in.t_start, in.t_stop, in.t_count);
  const TimeSeries series = coherence_factor(table, times, in.sampling);
  io::write_text(opt.out, io::format_time_series(series));
  log << "wrote " << times.size() << " times to " << opt.out.string() << "\n";
  write_manifest(manifest_path(opt.out),
                 {"dynamics", {opt.params.string()}, {opt.out.string()}, config_hash({"dynamics", text}), "", 0.0},
                 start);
  return kOk;
}

int cmd_verify(const VerifyOptions& opt, std::ostream& log) {
  const auto start = Clock::now();
  const std::string text = io::read_text(opt.model);
  const GaudinModel model = io::parse_model(text);
  const bool full = opt.level == VerifyLevel::Full;
  const std::size_t n = model.size();

  std::vector<SectorSolution> sectors;
  std::string solutions_text;
  if (opt.solutions) {
    solutions_text = io::read_text(*opt.solutions);
    try {
      sectors = load_sectors(model, solutions_text);
    } catch (const Error& e) {
      log << "corrupted solutions file " << opt.solutions->string() << ": " << e.what() << "\n";
      return kNumericalFailure;
    }
  } else {
    sectors = verify::solve_all_sectors(model);
  }

  std::vector<verify::CheckResult> results;
  auto record = [&](verify::CheckResult r) {
    log << verify::describe(r) << "\n";
    results.push_back(std::move(r));
  };
  using verify::CheckResult;
  record(guarded("solver completeness", [&] { return verify::solver_completeness(model, sectors); }));
  record(guarded("representation transform", [&] { return verify::representation_transform(model, sectors); }));
  record(guarded("jacobian vs finite differences",
                 [&] { return verify::jacobian_finite_difference(model, full ? 100 : 20, kVerifySeed); }));
  record(guarded("rapidity round trip", [&] { return verify::rapidity_round_trip(model, sectors); }));
  record(guarded("partition function triple",
                 [&] { return verify::partition_triple(full ? 200 : 40, 12, 8, kVerifySeed); }));
  record(guarded("recursion residue", [&] { return verify::recursion_residue(full ? 50 : 10, kVerifySeed); }));

  if (n <= ed::kMaxSpins) {
    record(guarded("spectrum equivalence", [&] { return verify::spectrum_equivalence(model, sectors); }));
    record(guarded("scalar products and norms",
                   [&] { return verify::scalar_products(model, sectors, full ? 8 : 3, kVerifySeed); }));
    record(guarded("form factors S+ and Sz",
                   [&] { return verify::form_factors(model, sectors, full ? 20 : 3, kVerifySeed); }));
  } else {
    log << "notice: N=" << n << " is above the exact-diagonalization limit of " << ed::kMaxSpins
        << "; oracle checks skipped\n";
    for (const char* name : {"spectrum equivalence", "scalar products and norms", "form factors S+ and Sz"}) {
      record(skipped(name, n));
    }
  }

  const verify::SignDetermination sign = verify::determine_sz_sign();
  log << "S^z sign determination: " << sign.report << "\n";
  {
    CheckResult r;
    r.name = "S^z sign determination";
    r.worst = sign.sign > 0 ? sign.error_plus : sign.error_minus;
    r.tolerance = 1e-12;
    r.passed = sign.sign == kSzCoefficientSign && r.worst <= r.tolerance;
    r.detail = sign.sign == kSzCoefficientSign ? "matches the implemented coefficient"
                                               : "disagrees with the implemented coefficient";
    record(r);
  }

  const std::size_t bath = full ? 5 : 3;
  const std::vector<double> times = time_grid(0.0, 10.0, full ? 201 : 51);
  record(guarded("central-spin coherence",
                 [&] { return verify::central_spin_dynamics(reference_central_spin(bath), times); }));

  const auto failed = std::count_if(results.begin(), results.end(), [](const CheckResult& r) { return !r.passed; });
  log << "verify: " << results.size() - static_cast<std::size_t>(failed) << "/" << results.size()
      << " checks passed\n";

  std::vector<std::string> inputs{opt.model.string()};
  if (opt.solutions) inputs.push_back(opt.solutions->string());
  write_manifest(opt.manifest,
                 {"verify", inputs, {}, config_hash({"verify", full ? "full" : "quick", text, solutions_text}), "", 0.0},
                 start);
  return failed == 0 ? kOk : kNumericalFailure;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenstates, overlaps, form factors and dynamics of Gaudin magnets", "gaudin"};
  app.set_version_flag("--version", GAUDIN_VERSION);
  app.require_subcommand(1);

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve every eigenstate of one sector or of all sectors");
  solve_cmd->add_option("model", solve.model, "model JSON")->required();
  auto* sector_opt = solve_cmd->add_option("--sector", solve.sector, "excitation number M");
  auto* all_opt = solve_cmd->add_flag("--all", solve.all, "all sectors 0..N");
  sector_opt->excludes(all_opt);
  solve_cmd->add_option("--out", solve.out, "solutions JSON")->required();

  FormFactorOptions ff;
  auto* ff_cmd = app.add_subcommand("formfactor", "Tabulate form factors between solved eigenstates");
  ff_cmd->add_option("model", ff.model, "model JSON")->required();
  ff_cmd->add_option("solutions", ff.solutions, "solutions JSON")->required();
  ff_cmd->add_option("--op", ff.op, "sz, sp or sm")->required()->check(CLI::IsMember({"sz", "sp", "sm"}));
  ff_cmd->add_option("--site", ff.site, "site index")->required();
  ff_cmd->add_option("--out", ff.out, "CSV table")->required();

  DynamicsOptions dyn;
  auto* dyn_cmd = app.add_subcommand("dynamics", "Central-spin coherence factor from the spectral sum");
  dyn_cmd->add_option("params", dyn.params, "parameter JSON")->required();
  dyn_cmd->add_option("--out", dyn.out, "CSV series")->required();

  VerifyOptions ver;
  std::string level = "quick";
  std::string solutions;
  auto* ver_cmd = app.add_subcommand("verify", "Run the oracle-equivalence checks");
  ver_cmd->add_option("model", ver.model, "model JSON")->required();
  ver_cmd->add_option("--level", level, "quick or full")->check(CLI::IsMember({"quick", "full"}));
  ver_cmd->add_option("--solutions", solutions, "check these states instead of solving");
  ver_cmd->add_option("--manifest", ver.manifest, "manifest path");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (solve_cmd->parsed()) return cmd_solve(solve, out);
    if (ff_cmd->parsed()) return cmd_formfactor(ff, out, err);
    if (dyn_cmd->parsed()) return cmd_dynamics(dyn, out);
    ver.level = level == "full" ? VerifyLevel::Full : VerifyLevel::Quick;
    if (!solutions.empty()) ver.solutions = solutions;
    return cmd_verify(ver, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}

}  // namespace gaudin::cli
