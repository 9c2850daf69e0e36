#include "manifest.hpp"

#include <cstdio>

#include <json.hpp>

namespace gaudin::cli {

std::uint64_t fnv1a(std::string_view data, std::uint64_t state) {
  for (unsigned char c : data) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

std::string config_hash(const std::vector<std::string>& parts) {
  std::uint64_t h = fnv1a("");
  for (const std::string& p : parts) {
    h = fnv1a(std::to_string(p.size()) + ":", h);
    h = fnv1a(p, h);
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_manifest(const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["config_hash"] = m.config_hash;
  j["version"] = m.version;
  j["wall_seconds"] = m.wall_seconds;
  return j.dump(2) + "\n";
}

}  // namespace gaudin::cli
