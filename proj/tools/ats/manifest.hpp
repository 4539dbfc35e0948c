#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace ats::cli {

struct Manifest {
  std::string command;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::filesystem::path> outputs;
  std::string config_hash;
  std::map<std::string, std::string> prompts;  // id -> fingerprint
  std::uint64_t seed = 0;
};

/// `<file>.manifest.json` beside a file output, `<dir>/manifest.json` for a directory.
std::filesystem::path manifest_path(const std::filesystem::path& output);

/// Inputs are hashed at write time. Output is deterministic (no timestamps).
void write_manifest(const std::filesystem::path& output, const Manifest& manifest);

}  // namespace ats::cli
