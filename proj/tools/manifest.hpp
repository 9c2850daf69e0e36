#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace gaudin::cli {

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::string config_hash;
  std::string version;
  double wall_seconds = 0.0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data, std::uint64_t state = 0xcbf29ce484222325ULL);

/// Hash of the command name, option strings and input file contents, as 16
/// hex digits. Each part is length-prefixed so boundaries matter.
std::string config_hash(const std::vector<std::string>& parts);

std::string format_manifest(const RunManifest& m);

}  // namespace gaudin::cli
