#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ats/chat.hpp"

namespace ats {

using TemplateVars = std::map<std::string, std::string, std::less<>>;

/// Replaces every `{{name}}` with vars[name]. Unknown names are an
/// Errc::TemplateError so a typo in a template never ships silently.
std::string render_template(std::string_view tmpl, const TemplateVars& vars);

/// A versioned prompt. File format:
///
///     # free-form comment lines
///     [system]
///     ...
///     [user]
///     ...
///
/// The id is the file stem, e.g. `simplify_document.v1`.
struct PromptTemplate {
  std::string id;
  std::string system;
  std::string user;
  std::string fingerprint;  // sha256 of the file contents

  static PromptTemplate parse(std::string id, std::string_view contents);

  /// Optional system message followed by the rendered user message.
  std::vector<Message> render(const TemplateVars& vars) const;
};

class PromptSet {
 public:
  /// Loads every `*.txt` file in `dir`.
  static PromptSet load(const std::filesystem::path& dir);

  void add(PromptTemplate tmpl);
  const PromptTemplate& get(std::string_view id) const;
  bool contains(std::string_view id) const;
  /// id -> fingerprint, for run manifests.
  std::map<std::string, std::string> fingerprints() const;

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

namespace prompt_ids {
inline constexpr std::string_view kSimplifySentence = "simplify_sentence.v1";
inline constexpr std::string_view kSimplifyDocument = "simplify_document.v1";
inline constexpr std::string_view kTermSupport = "term_support.v1";
inline constexpr std::string_view kExplainTerm = "explain_term.v1";
inline constexpr std::string_view kRound2 = "round2.v1";
}  // namespace prompt_ids

}  // namespace ats
