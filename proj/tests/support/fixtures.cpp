#include "fixtures.hpp"

#include <array>
#include <cstdlib>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ats/io.hpp"
#include "cli.hpp"

namespace ats::testing {

TempDir::TempDir() {
  std::string tmpl = (std::filesystem::temp_directory_path() / "ats-test-XXXXXX").string();
  if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
  path_ = tmpl;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::filesystem::path fixture_dir() { return ATS_TEST_FIXTURES_DIR; }
std::filesystem::path prompts_dir() { return ATS_TEST_PROMPTS_DIR; }

std::vector<termkb::LexiconEntry> fixture_lexicon() { return termkb::read_lexicon(fixture_dir() / "lexicon.jsonl"); }

corpus::CveRecord make_record(std::string id, std::string text) {
  corpus::CveRecord r;
  r.id = std::move(id);
  r.raw_description = text;
  r.cleaned_description = std::move(text);
  return r;
}

std::string cve_json(const std::string& id, const std::string& description) {
  const nlohmann::json doc = {
      {"dataType", "CVE_RECORD"},
      {"dataVersion", "5.1"},
      {"cveMetadata", {{"cveId", id}, {"state", "PUBLISHED"}}},
      {"containers", {{"cna", {{"descriptions", {{{"lang", "en"}, {"value", description}}}}}}}}};
  return doc.dump(2);
}

std::vector<SyntheticCve> synthetic_cves(std::size_t n, std::uint64_t seed) {
  static constexpr std::array<const char*, 8> kProducts{"ExampleViewer", "ShopCart",   "MailRelay", "NetCam Pro",
                                                        "DocServer",     "PhotoVault", "TaskBoard", "RouterOS Lite"};
  static constexpr std::array<const char*, 8> kVersions{"2.4.1", "4.3000000025", "1.9", "10.0.3",
                                                        "3.2.0-rc1", "7.1", "0.9.12", "5.5.2"};
  struct Flaw {
    const char* term;
    const char* effect;
  };
  static constexpr std::array<Flaw, 8> kFlaws{{
      {"cross-site scripting", "inject scripts that run in the browser of an administrator"},
      {"SQL injection", "read or change records in the backend database"},
      {"buffer overflow", "crash the service or achieve remote code execution"},
      {"path traversal", "read arbitrary files on the server"},
      {"use-after-free", "corrupt memory and gain privilege escalation"},
      {"cross-site request forgery", "change account settings on behalf of a logged-in user"},
      {"authentication bypass", "access the management interface without credentials"},
      {"denial of service", "make the service unavailable to legitimate users"},
  }};
  static constexpr std::array<const char*, 5> kExtras{
      "Exploitation of this issue requires user interaction in that a victim must open a malicious file.",
      "The issue is fixed in a later release.",
      "Users of the plugin should update as soon as possible.",
      "Attackers need network access to the affected service.",
      "No workaround is known.",
  };
  static constexpr std::array<const char*, 3> kLogs{
      "2025-04-01 12:00:03 ERROR worker: heap corrupted at 0x7ffd5e8a",
      "    at com.example.Handler.process(Handler.java:88)",
      ">>> trace id 7f3a9c1e",
  };

  std::mt19937_64 rng(seed);
  auto pick = [&rng](std::size_t size) { return static_cast<std::size_t>(rng() % size); };
  std::vector<SyntheticCve> out;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string product = kProducts[pick(kProducts.size())];
    const std::string version = kVersions[pick(kVersions.size())];
    const auto& flaw = kFlaws[pick(kFlaws.size())];
    SyntheticCve c;
    c.id = "CVE-2025-" + std::to_string(20000 + i);
    c.description = std::string("A ") + flaw.term + " vulnerability in " + product + " before version " + version +
                    " allows remote attackers to " + flaw.effect + ". " + kExtras[pick(kExtras.size())];
    if (pick(4) == 0) c.description += std::string("\n") + kLogs[pick(kLogs.size())];
    c.reference = product + " versions before " + version + " have a " + flaw.term + " problem. Attackers can " +
                  flaw.effect + ".";
    out.push_back(std::move(c));
  }
  return out;
}

void write_cve_dir(const std::filesystem::path& dir, const std::vector<SyntheticCve>& cves, std::size_t extra_invalid) {
  std::filesystem::create_directories(dir);
  for (const auto& c : cves) io::write_file(dir / (c.id + ".json"), cve_json(c.id, c.description));
  for (std::size_t i = 0; i < extra_invalid; ++i) {
    io::write_file(dir / ("broken-" + std::to_string(i) + ".json"), "{\"cveMetadata\": {\"cveId\": \"not-a-cve\"}}");
  }
}

void write_references(const std::filesystem::path& file, const std::vector<SyntheticCve>& cves) {
  std::string body;
  for (const auto& c : cves) body += nlohmann::json{{"cve_id", c.id}, {"text", c.reference}}.dump() + "\n";
  io::write_file(file, body);
}

std::string read_text(const std::filesystem::path& p) { return io::read_file(p); }

CliResult run_cli(const std::vector<std::string>& args, const std::map<std::string, std::string>& env) {
  std::ostringstream out, err;
  const cli::Env lookup = [env](std::string_view name) -> std::optional<std::string> {
    auto it = env.find(std::string(name));
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  const int status = cli::run(args, out, err, lookup);
  return {status, out.str(), err.str()};
}

}  // namespace ats::testing
