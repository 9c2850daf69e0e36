#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gaudin/error.hpp"

namespace gaudin::cli {

enum ExitCode : int {
  kOk = 0,
  kInputError = 1,
  kNumericalFailure = 2,
  kInternalError = 3,
};

int exit_code_for(ErrorCode code);

struct SolveOptions {
  std::filesystem::path model;
  std::optional<std::size_t> sector;
  bool all = false;
  std::filesystem::path out;
};

struct FormFactorOptions {
  std::filesystem::path model;
  std::filesystem::path solutions;
  std::string op;  // sz, sp or sm
  std::size_t site = 0;
  std::filesystem::path out;
};

struct DynamicsOptions {
  std::filesystem::path params;
  std::filesystem::path out;
};

enum class VerifyLevel { Quick, Full };

struct VerifyOptions {
  std::filesystem::path model;
  VerifyLevel level = VerifyLevel::Quick;
  std::optional<std::filesystem::path> solutions;
  std::filesystem::path manifest = "gaudin-verify.manifest.json";
};

// Each command writes its outputs plus a manifest, reports progress on `log`
// and throws gaudin::Error on failure.
int cmd_solve(const SolveOptions& opt, std::ostream& log);
int cmd_formfactor(const FormFactorOptions& opt, std::ostream& log, std::ostream& warn);
int cmd_dynamics(const DynamicsOptions& opt, std::ostream& log);
int cmd_verify(const VerifyOptions& opt, std::ostream& log);

/// Parses the command line and dispatches. Never throws; returns the exit
/// code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gaudin::cli
