#include "soga/run_manifest.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "soga/error.hpp"

namespace soga {

std::string fnv1a_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot hash missing file: " + path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void write_run_manifest(const RunManifest& m, const std::string& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json j = {
      {"subcommand", m.subcommand},
      {"config", m.config},
      {"seeds", m.seeds},
      {"input_hashes", m.input_hashes},
      {"version", m.version},
      {"wall_seconds", m.wall_seconds},
      {"outputs", m.outputs},
  };
  std::ofstream out(std::filesystem::path(dir) / "run_manifest.json");
  if (!out) throw DataError("cannot write run manifest in " + dir);
  out << j.dump(2) << '\n';
}

}  // namespace soga
