#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "gaudin/dynamics.hpp"
#include "gaudin/model.hpp"
#include "gaudin/rapidity.hpp"

/// File formats. Every parser throws Error(ParseError) on malformed input,
/// including NaN or infinite numbers.
namespace gaudin::io {

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

/// {"epsilons": [real...], "g": real}
GaudinModel parse_model(const std::string& text);
std::string format_model(const GaudinModel& model);

struct SolutionRecord {
  BasisOccupation occupation;
  LambdaState state;
  double residual_inf = 0.0;
};

/// [{"occupation": [int...], "M": int, "axis": "lambda"|"mu",
///   "values": [real...], "residual_inf": real}, ...]
std::string format_solutions(const std::vector<SolutionRecord>& records);
std::vector<SolutionRecord> parse_solutions(const GaudinModel& model, const std::string& text);

/// [[re, im], ...]
std::string format_rapidities(const RapiditySet& rap);
RapiditySet parse_rapidities(const std::string& text, Axis axis);

struct DynamicsInput {
  CentralSpinParams params;
  double t_start = 0.0;
  double t_stop = 0.0;
  std::size_t t_count = 0;
  Sampling sampling = FullSampling{};
};

/// {"B": real, "A": [real...], "alpha": [re, im], "beta": [re, im],
///  "occupation": [int...], "times": {"start", "stop", "count"},
///  "sampling": "full" | {"type": "monte_carlo", "count": int, "seed": int}}
DynamicsInput parse_dynamics_input(const std::string& text);

/// "t,re,im" with one row per time.
std::string format_time_series(const TimeSeries& series);

struct FormFactorRow {
  std::size_t bra_id = 0;
  std::size_t ket_id = 0;
  std::size_t site = 0;
  std::string op;
  double value = 0.0;
  /// The operator cannot connect the two sectors; value is zero.
  bool sector_mismatch = false;
};

/// "bra_id,ket_id,site,operator,value,sector_mismatch"
std::string format_form_factor_table(const std::vector<FormFactorRow>& rows);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace gaudin::io
