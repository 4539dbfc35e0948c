#include "manifest.hpp"

#include <algorithm>

#include <json.hpp>

#include "ats/io.hpp"

namespace ats::cli {
namespace {

// Digest over "relative-path<TAB>file-digest" lines of every file, sorted.
std::string directory_digest(const std::filesystem::path& dir) {
  std::vector<std::string> lines;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    lines.push_back(std::filesystem::relative(e.path(), dir).generic_string() + '\t' +
                    io::sha256_hex(io::read_file(e.path())));
  }
  std::sort(lines.begin(), lines.end());
  std::string all;
  for (const auto& l : lines) all += l + '\n';
  return io::sha256_hex(all);
}

}  // namespace

std::filesystem::path manifest_path(const std::filesystem::path& output) {
  if (std::filesystem::is_directory(output)) return output / "manifest.json";
  auto p = output;
  p += ".manifest.json";
  return p;
}

void write_manifest(const std::filesystem::path& output, const Manifest& m) {
  using nlohmann::json;
  json inputs = json::array();
  for (const auto& p : m.inputs) {
    json entry = {{"path", p.generic_string()}};
    if (std::filesystem::is_regular_file(p)) {
      entry["sha256"] = io::sha256_hex(io::read_file(p));
    } else if (std::filesystem::is_directory(p)) {
      entry["sha256"] = directory_digest(p);
    } else {
      entry["sha256"] = nullptr;
    }
    inputs.push_back(std::move(entry));
  }
  json outputs = json::array();
  for (const auto& p : m.outputs) outputs.push_back(p.generic_string());
  const json doc = {{"tool", "ats"},
                    {"version", ATS_VERSION},
                    {"command", m.command},
                    {"inputs", std::move(inputs)},
                    {"outputs", std::move(outputs)},
                    {"config_hash", m.config_hash},
                    {"prompts", m.prompts},
                    {"seed", m.seed}};
  io::write_file(manifest_path(output), doc.dump(2) + "\n");
}

}  // namespace ats::cli
