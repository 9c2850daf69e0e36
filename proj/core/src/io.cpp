#include "gaudin/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gaudin/error.hpp"

namespace gaudin::io {

namespace {

using nlohmann::json;

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
}

double finite_number(const json& j, const char* what) {
  if (!j.is_number()) throw Error(ErrorCode::ParseError, std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw Error(ErrorCode::ParseError, std::string(what) + " is not finite");
  return v;
}

std::size_t index_number(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<long long>() < 0) {
    throw Error(ErrorCode::ParseError, std::string(what) + " must be a non-negative integer");
  }
  return j.get<std::size_t>();
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw Error(ErrorCode::ParseError, std::string("missing field \"") + key + "\"");
  }
  return obj.at(key);
}

std::vector<double> real_array(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const json& v : j) out.push_back(finite_number(v, what));
  return out;
}

std::vector<std::size_t> index_array(const json& j, const char* what) {
  if (!j.is_array()) throw Error(ErrorCode::ParseError, std::string(what) + " must be an array");
  std::vector<std::size_t> out;
  for (const json& v : j) out.push_back(index_number(v, what));
  return out;
}

cplx complex_pair(const json& j, const char* what) {
  const std::vector<double> v = real_array(j, what);
  if (v.size() != 2) throw Error(ErrorCode::ParseError, std::string(what) + " must be [re, im]");
  return {v[0], v[1]};
}

// Domain errors raised while building objects from parsed input are input
// errors from the caller's point of view.
template <class F>
auto as_parse_error(F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, e.what());
  }
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write " + path.string());
  out << text;
}

std::string format_double(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return ec == std::errc() ? std::string(buf, end) : std::string("nan");
}

GaudinModel parse_model(const std::string& text) {
  const json j = parse_json(text);
  std::vector<double> eps = real_array(field(j, "epsilons"), "epsilons");
  const double g = finite_number(field(j, "g"), "g");
  // model validation errors (duplicates, g = 0) keep their own codes
  return GaudinModel(std::move(eps), g);
}

std::string format_model(const GaudinModel& model) {
  json j;
  j["epsilons"] = std::vector<double>(model.epsilons().begin(), model.epsilons().end());
  j["g"] = model.coupling();
  return j.dump(2) + "\n";
}

std::string format_solutions(const std::vector<SolutionRecord>& records) {
  json arr = json::array();
  for (const SolutionRecord& r : records) {
    json j;
    j["occupation"] = std::vector<std::size_t>(r.occupation.sites().begin(), r.occupation.sites().end());
    j["M"] = r.state.sector_m;
    j["axis"] = std::string(to_string(r.state.axis));
    j["values"] = r.state.values;
    j["residual_inf"] = r.residual_inf;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<SolutionRecord> parse_solutions(const GaudinModel& model, const std::string& text) {
  const json j = parse_json(text);
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "solutions file must be a JSON array");
  std::vector<SolutionRecord> out;
  for (const json& item : j) {
    SolutionRecord r;
    const std::vector<std::size_t> sites = index_array(field(item, "occupation"), "occupation");
    r.occupation = as_parse_error([&] { return BasisOccupation(sites, model.size()); });
    r.state.sector_m = index_number(field(item, "M"), "M");
    const json& axis = field(item, "axis");
    if (axis == "lambda") {
      r.state.axis = Axis::Lambda;
    } else if (axis == "mu") {
      r.state.axis = Axis::Mu;
    } else {
      throw Error(ErrorCode::ParseError, "axis must be \"lambda\" or \"mu\"");
    }
    r.state.values = real_array(field(item, "values"), "values");
    r.state.g = model.coupling();
    r.residual_inf = finite_number(field(item, "residual_inf"), "residual_inf");
    if (r.state.values.size() != model.size()) {
      throw Error(ErrorCode::ParseError, "values length differs from the model size");
    }
    if (r.state.sector_m > model.size() || r.occupation.size() != r.state.sector_m) {
      throw Error(ErrorCode::ParseError, "M does not match the occupation");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_rapidities(const RapiditySet& rap) {
  json arr = json::array();
  for (const cplx& v : rap.values) arr.push_back({v.real(), v.imag()});
  return arr.dump() + "\n";
}

RapiditySet parse_rapidities(const std::string& text, Axis axis) {
  const json j = parse_json(text);
  if (!j.is_array()) throw Error(ErrorCode::ParseError, "rapidity file must be a JSON array");
  RapiditySet out;
  out.axis = axis;
  for (const json& v : j) out.values.push_back(complex_pair(v, "rapidity"));
  return out;
}

DynamicsInput parse_dynamics_input(const std::string& text) {
  const json j = parse_json(text);
  DynamicsInput in;
  in.params.field = finite_number(field(j, "B"), "B");
  in.params.couplings = real_array(field(j, "A"), "A");
  in.params.alpha = complex_pair(field(j, "alpha"), "alpha");
  in.params.beta = complex_pair(field(j, "beta"), "beta");
  const std::vector<std::size_t> occ = index_array(field(j, "occupation"), "occupation");
  in.params.bath_occupation =
      as_parse_error([&] { return BasisOccupation(occ, in.params.couplings.size()); });
  const json& times = field(j, "times");
  in.t_start = finite_number(field(times, "start"), "times.start");
  in.t_stop = finite_number(field(times, "stop"), "times.stop");
  in.t_count = index_number(field(times, "count"), "times.count");
  if (in.t_count == 0) throw Error(ErrorCode::ParseError, "times.count must be positive");

  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    if (s == "full") {
      in.sampling = FullSampling{};
    } else if (s.is_object() && s.value("type", "") == "monte_carlo") {
      in.sampling = MonteCarloSampling{index_number(field(s, "count"), "sampling.count"),
                                       static_cast<std::uint64_t>(index_number(field(s, "seed"), "sampling.seed"))};
    } else {
      throw Error(ErrorCode::ParseError,
                  "sampling must be \"full\" or {\"type\": \"monte_carlo\", \"count\", \"seed\"}");
    }
  }
  as_parse_error([&] {
    in.params.validate();
    return 0;
  });
  return in;
}

std::string format_time_series(const TimeSeries& series) {
  std::string out = "t,re,im\n";
  for (std::size_t k = 0; k < series.times.size(); ++k) {
    out += format_double(series.times[k]) + "," + format_double(series.values[k].real()) + "," +
           format_double(series.values[k].imag()) + "\n";
  }
  return out;
}

std::string format_form_factor_table(const std::vector<FormFactorRow>& rows) {
  std::string out = "bra_id,ket_id,site,operator,value,sector_mismatch\n";
  for (const FormFactorRow& r : rows) {
    out += std::to_string(r.bra_id) + "," + std::to_string(r.ket_id) + "," + std::to_string(r.site) +
           "," + r.op + "," + format_double(r.value) + "," + (r.sector_mismatch ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace gaudin::io
