#include "ats/prompts.hpp"

#include <algorithm>

#include "ats/error.hpp"
#include "ats/io.hpp"

namespace ats {
namespace {

std::string strip_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

}  // namespace

std::string render_template(std::string_view tmpl, const TemplateVars& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw Error(Errc::TemplateError, "unterminated placeholder");
    out.append(tmpl.substr(pos, open - pos));
    const auto name = tmpl.substr(open + 2, close - open - 2);
    auto it = vars.find(name);
    if (it == vars.end()) throw Error(Errc::TemplateError, "no value for placeholder {{" + std::string(name) + "}}");
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

PromptTemplate PromptTemplate::parse(std::string id, std::string_view contents) {
  PromptTemplate t;
  t.id = std::move(id);
  t.fingerprint = io::sha256_hex(contents);

  std::string* section = nullptr;
  bool saw_user = false;
  std::size_t pos = 0;
  while (pos <= contents.size()) {
    auto nl = contents.find('\n', pos);
    if (nl == std::string_view::npos) nl = contents.size();
    std::string_view line = contents.substr(pos, nl - pos);
    pos = nl + 1;
    if (line == "[system]") {
      section = &t.system;
    } else if (line == "[user]") {
      section = &t.user;
      saw_user = true;
    } else if (section != nullptr) {
      section->append(line);
      section->push_back('\n');
    } else if (!line.empty() && !line.starts_with('#')) {
      throw Error(Errc::TemplateError, t.id + ": text before the first [system]/[user] section");
    }
    if (nl == contents.size()) break;
  }
  if (!saw_user) throw Error(Errc::TemplateError, t.id + ": missing [user] section");
  t.system = strip_trailing_newlines(std::move(t.system));
  t.user = strip_trailing_newlines(std::move(t.user));
  return t;
}

std::vector<Message> PromptTemplate::render(const TemplateVars& vars) const {
  std::vector<Message> out;
  if (!system.empty()) out.push_back({"system", render_template(system, vars)});
  out.push_back({"user", render_template(user, vars)});
  return out;
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw Error(Errc::ConfigError, "prompt directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  PromptSet set;
  for (const auto& f : files) set.add(PromptTemplate::parse(f.stem().string(), io::read_file(f)));
  return set;
}

void PromptSet::add(PromptTemplate tmpl) {
  auto id = tmpl.id;
  templates_.insert_or_assign(std::move(id), std::move(tmpl));
}

const PromptTemplate& PromptSet::get(std::string_view id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(Errc::TemplateError, "unknown prompt template '" + std::string(id) + "'");
  return it->second;
}

bool PromptSet::contains(std::string_view id) const { return templates_.find(id) != templates_.end(); }

std::map<std::string, std::string> PromptSet::fingerprints() const {
  std::map<std::string, std::string> out;
  for (const auto& [id, t] : templates_) out.emplace(id, t.fingerprint);
  return out;
}

}  // namespace ats
