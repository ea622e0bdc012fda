#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace soga {

inline constexpr const char* kToolVersion = "soga 0.1.0";

// Reproducibility sidecar written next to every run's outputs: the full
// effective config, input digests, tool version and timings are enough to
// replay the run bit-exactly.
struct RunManifest {
  std::string subcommand;
  nlohmann::json config;
  std::vector<std::uint64_t> seeds;
  std::map<std::string, std::string> input_hashes;  // path -> fnv1a-64 hex
  std::string version = kToolVersion;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;
};

std::string fnv1a_file_hex(const std::string& path);
void write_run_manifest(const RunManifest& m, const std::string& dir);

}  // namespace soga
