#include <cctype>
#include <set>
#include <unordered_set>

#include "ats/simplifier.hpp"

namespace ats::simplify {

std::string_view to_string(FindingKind kind) noexcept {
  switch (kind) {
    case FindingKind::VersionAltered: return "version_altered";
    case FindingKind::VersionMissing: return "version_missing";
    case FindingKind::IdMissing: return "id_missing";
  }
  return "version_missing";
}

std::vector<FidelityFinding> lint_fidelity(std::string_view original, std::string_view simplified) {
  const auto orig = text::tokenize(original);
  const auto simp = text::tokenize(simplified);

  std::unordered_set<std::string> present;
  for (const auto& t : simp.tokens) {
    if (!t.is_punct()) present.insert(t.text);
  }

  std::vector<FidelityFinding> out;
  std::set<std::string> seen;
  for (const auto& t : orig.tokens) {
    if (!t.is_literal() || !seen.insert(t.text).second) continue;
    if (present.count(t.text) != 0) continue;

    if (t.kind == text::TokenKind::NumberLike) {
      std::optional<std::string> prefix;
      for (std::size_t n = t.text.size() - 1; n > 0; --n) {
        if (!std::isdigit(static_cast<unsigned char>(t.text[n - 1]))) continue;
        std::string candidate = t.text.substr(0, n);
        if (present.count(candidate) != 0) {
          prefix = std::move(candidate);
          break;
        }
      }
      if (prefix) {
        out.push_back({FindingKind::VersionAltered, t.text, std::move(prefix)});
      } else {
        out.push_back({FindingKind::VersionMissing, t.text, std::nullopt});
      }
    } else {
      out.push_back({FindingKind::IdMissing, t.text, std::nullopt});
    }
  }
  return out;
}

}  // namespace ats::simplify
