#include "ats/simplifier.hpp"

#include <json.hpp>

#include "ats/error.hpp"
#include "ats/io.hpp"

namespace ats::simplify {
namespace {

using nlohmann::json;

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : text::trim(s)) {
    if (text::is_space(c)) {
      space = true;
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += c;
  }
  return out;
}

json messages_to_json(std::span<const Message> messages) {
  json arr = json::array();
  for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

const corpus::CveRecord& require_text(const corpus::CveRecord& record) {
  if (text::trim(record.cleaned_description).empty()) {
    throw Error(Errc::EmptyDescription, record.id + " has no cleaned description");
  }
  return record;
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
  switch (mode) {
    case Mode::Sentence: return "sentence";
    case Mode::Document: return "document";
    case Mode::Agent: return "agent";
  }
  return "document";
}

Mode mode_from_string(std::string_view name) {
  if (name == "sentence") return Mode::Sentence;
  if (name == "document") return Mode::Document;
  if (name == "agent") return Mode::Agent;
  throw Error(Errc::ConfigError, "unknown simplification mode '" + std::string(name) + "'");
}

std::string_view to_string(Flag flag) noexcept {
  switch (flag) {
    case Flag::RefusalFallback: return "refusal_fallback";
    case Flag::NoChange: return "no_change";
    case Flag::FidelityViolation: return "fidelity_violation";
  }
  return "no_change";
}

Flag flag_from_string(std::string_view name) {
  if (name == "refusal_fallback") return Flag::RefusalFallback;
  if (name == "no_change") return Flag::NoChange;
  if (name == "fidelity_violation") return Flag::FidelityViolation;
  throw Error(Errc::MalformedDocument, "unknown flag '" + std::string(name) + "'");
}

std::string to_json_line(const SimplificationVersion& v) {
  json j = json::object();
  j["cve_id"] = v.cve_id;
  j["round"] = v.round;
  j["mode"] = std::string(to_string(v.mode));
  j["model"] = v.model_id;
  j["prompt_id"] = v.prompt_id;
  j["text"] = v.text;
  if (v.alignment) {
    json arr = json::array();
    for (const auto& a : *v.alignment) {
      arr.push_back({{"start", a.original.start}, {"end", a.original.end}, {"text", a.simplified}});
    }
    j["alignment"] = std::move(arr);
  }
  j["flags"] = json::array();
  for (Flag f : v.flags) j["flags"].push_back(std::string(to_string(f)));
  return j.dump();
}

SimplificationVersion version_from_json_line(std::string_view line) {
  try {
    const json j = json::parse(line);
    SimplificationVersion v;
    v.cve_id = j.at("cve_id").get<std::string>();
    v.round = j.at("round").get<int>();
    if (v.round < 1) throw Error(Errc::MalformedDocument, "round must be >= 1");
    v.mode = mode_from_string(j.at("mode").get<std::string>());
    v.model_id = j.value("model", std::string());
    v.prompt_id = j.value("prompt_id", std::string());
    v.text = j.at("text").get<std::string>();
    if (auto it = j.find("alignment"); it != j.end() && !it->is_null()) {
      std::vector<AlignedSentence> alignment;
      for (const auto& a : *it) {
        alignment.push_back({{a.at("start").get<std::size_t>(), a.at("end").get<std::size_t>()},
                             a.at("text").get<std::string>()});
      }
      v.alignment = std::move(alignment);
    }
    for (const auto& f : j.value("flags", json::array())) v.flags.insert(flag_from_string(f.get<std::string>()));
    return v;
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedDocument, std::string("simplification line: ") + e.what());
  }
}

void write_store(std::span<const SimplificationVersion> versions, const std::filesystem::path& path) {
  std::string out;
  for (const auto& v : versions) {
    out += to_json_line(v);
    out += '\n';
  }
  io::write_file(path, out);
}

std::vector<SimplificationVersion> read_store(const std::filesystem::path& path) {
  std::vector<SimplificationVersion> out;
  for (const auto& line : io::read_lines(path)) out.push_back(version_from_json_line(line));
  return out;
}

Simplifier::Simplifier(ChatClient& client, const PromptSet& prompts, SimplifierOptions options)
    : client_(&client), prompts_(&prompts), options_(std::move(options)) {}

void Simplifier::finish(const corpus::CveRecord& record, SimplificationVersion& version) const {
  version.cve_id = record.id;
  version.model_id = client_->model_id();
  if (collapse_whitespace(version.text) == collapse_whitespace(record.cleaned_description)) {
    version.flags.insert(Flag::NoChange);
  }
  if (!lint_fidelity(record.cleaned_description, version.text).empty()) version.flags.insert(Flag::FidelityViolation);
}

SimplificationVersion Simplifier::simplify_sentencewise(const corpus::CveRecord& record) {
  const std::string_view source = require_text(record).cleaned_description;
  const auto& tmpl = prompts_->get(options_.sentence_prompt);

  SimplificationVersion v;
  v.mode = Mode::Sentence;
  v.prompt_id = options_.sentence_prompt;
  std::vector<AlignedSentence> alignment;
  for (const auto& span : text::split_sentences(source).sentences) {
    const std::string sentence(span.in(source));
    const auto reply = client_->chat(tmpl.render({{"sentence", sentence}}));
    if (reply.refusal) {
      alignment.push_back({span, sentence});
      v.flags.insert(Flag::RefusalFallback);
    } else {
      alignment.push_back({span, std::string(text::trim(reply.text))});
    }
  }
  for (const auto& a : alignment) {
    if (!v.text.empty()) v.text += ' ';
    v.text += a.simplified;
  }
  v.alignment = std::move(alignment);
  finish(record, v);
  return v;
}

std::vector<Message> Simplifier::build_document_request(
    const corpus::CveRecord& record, std::optional<std::span<const termkb::TermExplanation>> explanations) const {
  require_text(record);
  std::string support;
  if (explanations) {
    std::string lines;
    for (const auto& e : *explanations) {
      if (!e.explained) continue;
      if (!lines.empty()) lines += '\n';
      lines += "- " + e.term + ": " + e.explanation;
    }
    if (!lines.empty()) support = render_template(prompts_->get(options_.support_prompt).user, {{"explanations", lines}});
  }
  return prompts_->get(options_.document_prompt).render({{"text", record.cleaned_description}, {"support", support}});
}

SimplificationVersion Simplifier::simplify_document(
    const corpus::CveRecord& record, std::optional<std::span<const termkb::TermExplanation>> explanations) {
  const auto messages = build_document_request(record, explanations);
  SimplificationVersion v;
  v.mode = explanations ? Mode::Agent : Mode::Document;
  v.prompt_id = explanations ? options_.document_prompt + "+" + options_.support_prompt : options_.document_prompt;
  const auto reply = client_->chat(messages);
  if (reply.refusal) {
    v.text = record.cleaned_description;
    v.flags.insert(Flag::RefusalFallback);
  } else {
    v.text = std::string(text::trim(reply.text));
  }
  finish(record, v);
  return v;
}

std::vector<Message> Simplifier::build_round2_request(const corpus::CveRecord& record, const SimplificationVersion& v1,
                                                      std::span<const std::string> comments) const {
  if (v1.round != 1) {
    throw Error(Errc::WrongRound, v1.cve_id + " version is from round " + std::to_string(v1.round) + ", expected 1");
  }
  require_text(record);
  // Agent versions record "document+support"; the document template is the prompt.
  const std::string first_id = v1.prompt_id.substr(0, v1.prompt_id.find('+'));
  const auto& original = prompts_->get(first_id);
  const std::string original_prompt = original.system.empty() ? original.user : original.system;

  std::string comment_block;
  for (const auto& c : comments) {
    if (!comment_block.empty()) comment_block += '\n';
    comment_block += "- " + std::string(text::trim(c));
  }
  if (comment_block.empty()) comment_block = std::string(kNoReviewerComments);

  const auto& tmpl = prompts_->get(options_.round2_prompt);
  return {
      {"system", original_prompt},
      {"user", render_template(tmpl.user, {{"original", record.cleaned_description},
                                           {"simplification", v1.text},
                                           {"comments", comment_block}})},
  };
}

SimplificationVersion Simplifier::resimplify(const corpus::CveRecord& record, const SimplificationVersion& v1,
                                             std::span<const std::string> comments) {
  const auto messages = build_round2_request(record, v1, comments);
  SimplificationVersion v;
  v.round = 2;
  v.mode = Mode::Document;
  v.prompt_id = options_.round2_prompt;
  const auto reply = client_->chat(messages);
  if (reply.refusal) {
    v.text = record.cleaned_description;
    v.flags.insert(Flag::RefusalFallback);
  } else {
    v.text = std::string(text::trim(reply.text));
  }
  finish(record, v);
  return v;
}

std::string to_json_line(const AgentAudit& audit) {
  json j = json::object();
  j["cve_id"] = audit.cve_id;
  j["mentions"] = json::array();
  for (const auto& m : audit.mentions) {
    j["mentions"].push_back({{"surface", m.surface},
                             {"label", std::string(termkb::to_string(m.label))},
                             {"start", m.span.start},
                             {"end", m.span.end},
                             {"source", std::string(termkb::to_string(m.source))}});
  }
  j["explanations"] = json::array();
  for (const auto& e : audit.explanations) {
    json evidence = json::array();
    for (const auto& ev : e.evidence) evidence.push_back({{"term", ev.term}, {"source", ev.source}});
    j["explanations"].push_back({{"term", e.term},
                                 {"explained", e.explained},
                                 {"explanation", e.explanation},
                                 {"evidence", std::move(evidence)},
                                 {"error", e.error},
                                 {"prompt", messages_to_json(e.prompt)}});
  }
  j["simplification_prompt"] = messages_to_json(audit.simplification_prompt);
  j["warnings"] = audit.warnings;
  return j.dump();
}

AgentResult run_agent_pipeline(const corpus::CveRecord& record, const termkb::TermExtractor& extractor,
                               const termkb::LexiconIndex& index, Simplifier& simplifier, const AgentOptions& options) {
  require_text(record);
  AgentResult result;
  result.audit.cve_id = record.id;

  auto extraction = extractor.extract_with_fallback(record.cleaned_description, options.strategy);
  result.audit.mentions = std::move(extraction.mentions);
  result.audit.warnings = std::move(extraction.warnings);

  result.audit.explanations =
      termkb::explain_terms(result.audit.mentions, index, simplifier.client(), simplifier.prompts(), options.explain);
  const std::span<const termkb::TermExplanation> support(result.audit.explanations);
  result.audit.simplification_prompt = simplifier.build_document_request(record, support);
  result.version = simplifier.simplify_document(record, support);
  return result;
}

}  // namespace ats::simplify
