#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ats/corpus.hpp"
#include "ats/error.hpp"
#include "ats/termkb.hpp"

namespace ats::testing {

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

std::filesystem::path fixture_dir();
std::filesystem::path prompts_dir();

std::vector<termkb::LexiconEntry> fixture_lexicon();

corpus::CveRecord make_record(std::string id, std::string text);

/// Minimal CVE JSON 5 document with one English description.
std::string cve_json(const std::string& id, const std::string& description);

struct SyntheticCve {
  std::string id;
  std::string description;  // may contain log lines to be cleaned
  std::string reference;    // plain-language reference simplification
};

/// Deterministic CVE-like descriptions built from lexicon terms, product
/// names and version strings.
std::vector<SyntheticCve> synthetic_cves(std::size_t n, std::uint64_t seed);

/// One `<id>.json` per record, plus `extra_invalid` malformed files.
void write_cve_dir(const std::filesystem::path& dir, const std::vector<SyntheticCve>& cves, std::size_t extra_invalid = 0);
void write_references(const std::filesystem::path& file, const std::vector<SyntheticCve>& cves);

std::string read_text(const std::filesystem::path& p);

struct CliResult {
  int status = 0;
  std::string out;
  std::string err;
};

/// Runs the command-line front end in-process with `env` as the only environment.
CliResult run_cli(const std::vector<std::string>& args, const std::map<std::string, std::string>& env = {});

/// Code of the ats::Error thrown by `fn`, or nullopt when it returns normally.
template <class F>
std::optional<Errc> errc_of(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace ats::testing
