#include "commands.hpp"

#include <algorithm>
#include <memory>
#include <ostream>
#include <set>

#include <json.hpp>

#include "ats/chat.hpp"
#include "ats/corpus.hpp"
#include "ats/embedding.hpp"
#include "ats/error.hpp"
#include "ats/io.hpp"
#include "ats/metrics.hpp"
#include "ats/prompts.hpp"
#include "ats/review.hpp"
#include "ats/review_service.hpp"
#include "ats/simplifier.hpp"
#include "ats/termkb.hpp"
#include "manifest.hpp"

namespace ats::cli {
namespace {

using nlohmann::json;

// Stands in where a Simplifier is needed only to build requests.
class OfflineChatClient final : public ChatClient {
 public:
  std::string model_id() const override { return "offline"; }

 protected:
  std::string complete(std::span<const Message>) override {
    throw Error(Errc::ConfigError, "no chat endpoint is used by this command");
  }
};

void require_file(const path& p, std::string_view what) {
  if (p.empty()) throw Error(Errc::ConfigError, std::string(what) + " is required");
  if (!std::filesystem::is_regular_file(p)) throw Error(Errc::ConfigError, p.string() + " does not exist");
}

void require_out(const path& p) {
  if (p.empty()) throw Error(Errc::ConfigError, "--out is required");
}

std::vector<corpus::CveRecord> select_records(const corpus::Corpus& c, const std::string& split) {
  std::string wanted = split;
  if (wanted == "auto") {
    const bool any_eval = std::any_of(c.records.begin(), c.records.end(),
                                      [](const auto& r) { return r.split == corpus::Split::Eval; });
    wanted = any_eval ? "eval" : "all";
  }
  if (wanted == "all") return c.records;
  const auto s = corpus::split_from_string(wanted);
  std::vector<corpus::CveRecord> out;
  for (const auto& r : c.records) {
    if (r.split == s) out.push_back(r);
  }
  return out;
}

std::unique_ptr<ChatClient> make_chat(const RunConfig& cfg) {
  if (cfg.chat.base_url.empty()) throw Error(Errc::ConfigError, "llm.base_url is not set (ATS_LLM_BASE_URL)");
  return std::make_unique<HttpChatClient>(cfg.chat);
}

std::unique_ptr<EmbeddingProvider> make_embedder(const RunConfig& cfg) {
  if (cfg.embed.base_url.empty()) return std::make_unique<HashEmbeddingProvider>(cfg.seed);
  return std::make_unique<HttpEmbeddingProvider>(cfg.embed);
}

std::unique_ptr<termkb::NerClient> make_ner(const RunConfig& cfg, termkb::Strategy strategy) {
  if (cfg.ner.base_url.empty()) {
    if (strategy != termkb::Strategy::Lexicon) {
      throw Error(Errc::ConfigError, "strategy " + std::string(to_string(strategy)) +
                                         " needs ner.base_url (ATS_NER_BASE_URL)");
    }
    return nullptr;
  }
  return std::make_unique<termkb::HttpNerClient>(cfg.ner);
}

termkb::LexiconIndex load_lexicon(const path& p) {
  require_file(p, "--lexicon");
  return termkb::index_lexicon(termkb::read_lexicon(p));
}

const corpus::CveRecord& record_for(const corpus::Corpus& c, const std::string& id) {
  const auto* rec = c.find(id);
  if (!rec) throw Error(Errc::ConfigError, id + " is not in the corpus");
  return *rec;
}

const simplify::SimplificationVersion* version_for(std::span<const simplify::SimplificationVersion> store,
                                                   const std::string& id) {
  for (const auto& v : store) {
    if (v.cve_id == id) return &v;
  }
  return nullptr;
}

void write_lines(const path& p, const std::vector<std::string>& lines) {
  std::string body;
  for (const auto& l : lines) body += l + '\n';
  io::write_file(p, body);
}

Manifest manifest(const Context& ctx, std::string command, std::vector<path> inputs, std::vector<path> outputs,
                  const PromptSet* prompts = nullptr) {
  Manifest m;
  m.command = std::move(command);
  m.inputs = std::move(inputs);
  m.outputs = std::move(outputs);
  m.config_hash = ctx.config.hash();
  if (prompts) m.prompts = prompts->fingerprints();
  m.seed = ctx.config.seed;
  return m;
}

// Round-(n-1) tasks that were not accepted, in task order.
std::vector<std::string> pending_after(const review::ReviewStore& store, int round) {
  std::vector<std::string> ids;
  for (const auto& d : store.decisions(round)) {
    if (!d.accepted) ids.push_back(d.cve_id);
  }
  return ids;
}

void require_closed(const review::ReviewStore& store, int round) {
  if (store.round(round).status != review::RoundStatus::Closed) {
    throw Error(Errc::RoundOpen, "round " + std::to_string(round) + " is still open");
  }
}

}  // namespace

void cmd_ingest(Context& ctx) {
  const auto& o = ctx.opt;
  if (!std::filesystem::is_directory(o.input)) throw Error(Errc::ConfigError, "--input must be a directory");
  require_out(o.out);
  auto result = corpus::ingest_directory(o.input);
  for (const auto& s : result.skipped) ctx.err << "skipped " << s << '\n';
  corpus::write_corpus(result.corpus, o.out);
  write_manifest(o.out, manifest(ctx, "ingest", {o.input}, {o.out}));
  ctx.out << "ingested " << result.corpus.records.size() << " records, skipped " << result.skipped.size() << '\n';
}

void cmd_clean(Context& ctx) {
  const auto& o = ctx.opt;
  require_file(o.corpus, "--corpus");
  require_out(o.out);
  auto c = corpus::read_corpus(o.corpus);
  std::vector<corpus::SpanOverride> overrides;
  std::vector<path> inputs{o.corpus};
  if (!o.overrides.empty()) {
    require_file(o.overrides, "--overrides");
    overrides = corpus::read_overrides(o.overrides);
    inputs.push_back(o.overrides);
  }
  std::size_t changed = 0;
  for (auto& rec : c.records) {
    std::optional<std::vector<corpus::RemovedSpan>> spans;
    for (const auto& ov : overrides) {
      if (ov.id == rec.id) spans = ov.spans;
    }
    rec = corpus::clean_description(rec, spans);
    if (!rec.removed_spans.empty()) ++changed;
  }
  corpus::write_corpus(c, o.out);
  write_manifest(o.out, manifest(ctx, "clean", inputs, {o.out}));
  ctx.out << "cleaned " << c.records.size() << " records, " << changed << " had spans removed\n";
}

void cmd_sample(Context& ctx) {
  const auto& o = ctx.opt;
  require_file(o.corpus, "--corpus");
  require_out(o.out);
  const auto c = corpus::partition_corpus(corpus::read_corpus(o.corpus), o.eval_n, o.dev_n, ctx.config.seed);
  corpus::write_corpus(c, o.out);
  write_manifest(o.out, manifest(ctx, "sample", {o.corpus}, {o.out}));
  ctx.out << "eval " << o.eval_n << ", dev " << o.dev_n << ", seed " << ctx.config.seed << '\n';
}

void cmd_simplify(Context& ctx) {
  const auto& o = ctx.opt;
  const auto& cfg = ctx.config;
  require_file(o.corpus, "--corpus");
  require_out(o.out);
  if (o.round < 1 || o.round > 2) throw Error(Errc::ConfigError, "--round must be 1 or 2");
  const auto mode = simplify::mode_from_string(o.mode);
  const auto c = corpus::read_corpus(o.corpus);
  const auto prompts = PromptSet::load(cfg.prompts_dir);
  auto chat = make_chat(cfg);
  simplify::Simplifier simplifier(*chat, prompts);

  std::vector<path> inputs{o.corpus};
  std::vector<simplify::SimplificationVersion> versions;
  std::vector<std::string> audit_lines;

  if (o.round == 2) {
    require_file(o.previous, "--previous");
    require_file(o.log, "--log");
    inputs.push_back(o.previous);
    inputs.push_back(o.log);
    const auto v1_store = simplify::read_store(o.previous);
    const review::ReviewStore survey(o.log);
    require_closed(survey, 1);
    const auto comments = survey.comments(1);
    for (const auto& id : pending_after(survey, 1)) {
      const auto* v1 = version_for(v1_store, id);
      if (!v1) throw Error(Errc::ConfigError, id + " has no round-1 version in " + o.previous.string());
      const auto it = comments.find(id);
      const std::vector<std::string> none;
      versions.push_back(simplifier.resimplify(record_for(c, id), *v1, it == comments.end() ? none : it->second));
    }
  } else if (mode == simplify::Mode::Agent) {
    const auto index = load_lexicon(o.lexicon);
    inputs.push_back(o.lexicon);
    const auto strategy = termkb::strategy_from_string(cfg.strategy);
    auto ner = make_ner(cfg, strategy);
    const termkb::TermExtractor extractor(index, ner.get());
    simplify::AgentOptions agent;
    agent.strategy = strategy;
    agent.explain.k = cfg.k;
    agent.explain.max_parallel = cfg.parallel;
    for (const auto& rec : select_records(c, o.split)) {
      auto result = simplify::run_agent_pipeline(rec, extractor, index, simplifier, agent);
      for (const auto& w : result.audit.warnings) ctx.err << rec.id << ": " << w << '\n';
      audit_lines.push_back(simplify::to_json_line(result.audit));
      versions.push_back(std::move(result.version));
    }
  } else {
    for (const auto& rec : select_records(c, o.split)) {
      versions.push_back(mode == simplify::Mode::Sentence ? simplifier.simplify_sentencewise(rec)
                                                          : simplifier.simplify_document(rec));
    }
  }

  simplify::write_store(versions, o.out);
  std::vector<path> outputs{o.out};
  if (!audit_lines.empty()) {
    path audit = o.audit;
    if (audit.empty()) {
      audit = o.out;
      audit += ".audit.jsonl";
    }
    write_lines(audit, audit_lines);
    outputs.push_back(audit);
  }
  write_manifest(o.out, manifest(ctx, "simplify", inputs, outputs, &prompts));

  std::size_t refusals = 0;
  std::size_t violations = 0;
  for (const auto& v : versions) {
    refusals += v.has(simplify::Flag::RefusalFallback);
    violations += v.has(simplify::Flag::FidelityViolation);
  }
  ctx.out << "simplified " << versions.size() << " records (round " << o.round << "); " << refusals
          << " refusal fallbacks, " << violations << " fidelity violations\n";
}

void cmd_explain(Context& ctx) {
  const auto& o = ctx.opt;
  const auto& cfg = ctx.config;
  require_file(o.corpus, "--corpus");
  require_out(o.out);
  const auto c = corpus::read_corpus(o.corpus);
  const auto index = load_lexicon(o.lexicon);
  const auto prompts = PromptSet::load(cfg.prompts_dir);
  auto chat = make_chat(cfg);
  const auto strategy = termkb::strategy_from_string(cfg.strategy);
  auto ner = make_ner(cfg, strategy);
  const termkb::TermExtractor extractor(index, ner.get());
  termkb::ExplainOptions explain;
  explain.k = cfg.k;
  explain.max_parallel = cfg.parallel;

  std::vector<std::string> lines;
  std::size_t explained = 0;
  for (const auto& rec : select_records(c, o.split)) {
    simplify::AgentAudit audit;
    audit.cve_id = rec.id;
    auto extraction = extractor.extract_with_fallback(rec.cleaned_description, strategy);
    audit.mentions = std::move(extraction.mentions);
    audit.warnings = std::move(extraction.warnings);
    audit.explanations = termkb::explain_terms(audit.mentions, index, *chat, prompts, explain);
    for (const auto& e : audit.explanations) explained += e.explained;
    for (const auto& w : audit.warnings) ctx.err << rec.id << ": " << w << '\n';
    lines.push_back(simplify::to_json_line(audit));
  }
  write_lines(o.out, lines);
  write_manifest(o.out, manifest(ctx, "explain", {o.corpus, o.lexicon}, {o.out}, &prompts));
  ctx.out << "explained " << explained << " terms across " << lines.size() << " records\n";
}

void cmd_evaluate(Context& ctx) {
  const auto& o = ctx.opt;
  const auto& cfg = ctx.config;
  require_file(o.corpus, "--corpus");
  require_out(o.out);

  std::set<std::string> groups;
  for (const auto& m : o.metrics) {
    if (m == "all") {
      groups.insert({"dsari", "bertscore", "semsim", "simplicity", "ne"});
    } else if (m == "dsari" || m == "bertscore" || m == "semsim" || m == "fkgl" || m == "simplicity" || m == "ne") {
      groups.insert(m);
    } else {
      throw Error(Errc::ConfigError, "unknown metric '" + m + "' (dsari, bertscore, semsim, fkgl, simplicity, ne, all)");
    }
  }
  const bool all = std::find(o.metrics.begin(), o.metrics.end(), "all") != o.metrics.end();
  auto drop_or_fail = [&](const std::string& group, const std::string& why) {
    if (!all || std::find(o.metrics.begin(), o.metrics.end(), group) != o.metrics.end()) {
      throw Error(Errc::ConfigError, "metric " + group + " " + why);
    }
    ctx.err << "skipping " << group << ": " << why << '\n';
    groups.erase(group);
  };
  if (groups.count("dsari") && o.references.empty()) drop_or_fail("dsari", "needs --references");
  if (groups.count("ne") && o.lexicon.empty()) drop_or_fail("ne", "needs --lexicon");

  const auto c = corpus::read_corpus(o.corpus);
  std::vector<path> inputs{o.corpus};

  // (id, input, candidate) triples.
  struct Item {
    std::string id;
    std::string input;
    std::string candidate;
  };
  std::vector<Item> items;
  if (!o.simplified.empty()) {
    require_file(o.simplified, "--simplified");
    inputs.push_back(o.simplified);
    for (const auto& v : simplify::read_store(o.simplified)) {
      items.push_back({v.cve_id, record_for(c, v.cve_id).cleaned_description, v.text});
    }
  } else {
    for (const auto& rec : select_records(c, o.split)) items.push_back({rec.id, rec.cleaned_description, rec.cleaned_description});
  }
  if (items.empty()) throw Error(Errc::EmptyInput, "nothing to evaluate");

  std::map<std::string, std::string> references;
  if (groups.count("dsari")) {
    require_file(o.references, "--references");
    inputs.push_back(o.references);
    for (const auto& line : io::read_lines(o.references)) {
      try {
        const auto j = json::parse(line);
        references[j.at("cve_id").get<std::string>()] = j.at("text").get<std::string>();
      } catch (const json::exception& e) {
        throw Error(Errc::MalformedDocument, o.references.string() + ": " + e.what());
      }
    }
  }

  std::unique_ptr<EmbeddingProvider> embedder;
  if (groups.count("bertscore") || groups.count("semsim")) embedder = make_embedder(cfg);

  std::vector<std::size_t> ne_counts;
  if (groups.count("ne")) {
    const auto index = load_lexicon(o.lexicon);
    inputs.push_back(o.lexicon);
    const auto strategy = termkb::strategy_from_string(cfg.strategy);
    auto ner = make_ner(cfg, strategy);
    const termkb::TermExtractor extractor(index, ner.get());
    std::vector<std::string> docs;
    for (const auto& it : items) docs.push_back(it.candidate);
    ne_counts = metrics::ne_stats(docs, extractor, strategy).counts;
  }

  std::vector<metrics::DocumentRow> rows;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    metrics::DocumentRow row;
    row.id = it.id;
    if (groups.count("dsari")) {
      const auto ref = references.find(it.id);
      if (ref == references.end()) throw Error(Errc::EmptyReference, "no reference for " + it.id);
      const auto d = metrics::dsari(it.input, it.candidate, ref->second, cfg.max_n);
      row.set(metrics::column::kDsari, d.d_sari);
      row.set(metrics::column::kDkeep, d.d_keep);
      row.set(metrics::column::kDadd, d.d_add);
      row.set(metrics::column::kDdel, d.d_del);
    }
    if (groups.count("bertscore")) {
      const auto b = metrics::bertscore_text(it.candidate, it.input, *embedder);
      row.set(metrics::column::kBertP, b.precision);
      row.set(metrics::column::kBertR, b.recall);
      row.set(metrics::column::kBertF1, b.f1);
    }
    if (groups.count("semsim")) row.set(metrics::column::kSemSim, metrics::semantic_similarity(it.candidate, it.input, *embedder));
    if (groups.count("fkgl") || groups.count("simplicity")) {
      const auto r = metrics::readability(it.candidate);
      row.set(metrics::column::kFkgl, r.fkgl);
      if (groups.count("simplicity")) {
        row.set(metrics::column::kWords, static_cast<double>(r.word_count));
        row.set(metrics::column::kSentences, static_cast<double>(r.sentence_count));
        row.set(metrics::column::kSyllablesPerWord, r.asw);
      }
    }
    if (groups.count("ne")) row.set(metrics::column::kNamedEntities, static_cast<double>(ne_counts[i]));
    rows.push_back(std::move(row));
  }

  std::string system = o.system;
  if (system.empty()) system = o.simplified.empty() ? "original" : o.simplified.stem().string();
  const auto report = metrics::aggregate_report(system, std::move(rows));
  std::filesystem::create_directories(o.out);
  const auto docs_csv = o.out / "documents.csv";
  const auto system_csv = o.out / "system.csv";
  io::write_file(docs_csv, metrics::documents_csv(report));
  const std::vector<metrics::SystemSummary> summary{report.summary()};
  io::write_file(system_csv, metrics::systems_csv(summary));
  write_manifest(o.out, manifest(ctx, "evaluate", inputs, {docs_csv, system_csv}));

  ctx.out << system << ": " << report.rows.size() << " documents";
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    ctx.out << ", " << report.columns[i] << '=' << io::format_fixed(report.means[i], 4);
  }
  ctx.out << '\n';
}

void cmd_lint(Context& ctx) {
  const auto& o = ctx.opt;
  require_file(o.corpus, "--corpus");
  require_file(o.simplified, "--simplified");
  const auto c = corpus::read_corpus(o.corpus);
  std::vector<std::string> lines;
  for (const auto& v : simplify::read_store(o.simplified)) {
    for (const auto& f : simplify::lint_fidelity(record_for(c, v.cve_id).cleaned_description, v.text)) {
      json j = {{"cve_id", v.cve_id},
                {"round", v.round},
                {"kind", std::string(simplify::to_string(f.kind))},
                {"original_token", f.original_token}};
      j["found_token"] = f.found_token ? json(*f.found_token) : json(nullptr);
      lines.push_back(j.dump());
    }
  }
  if (o.out.empty()) {
    for (const auto& l : lines) ctx.out << l << '\n';
  } else {
    write_lines(o.out, lines);
    write_manifest(o.out, manifest(ctx, "lint", {o.corpus, o.simplified}, {o.out}));
    ctx.out << lines.size() << " findings\n";
  }
  if (o.strict && !lines.empty()) throw Error(Errc::MalformedDocument, std::to_string(lines.size()) + " fidelity findings");
}

void cmd_survey_create(Context& ctx) {
  const auto& o = ctx.opt;
  require_file(o.corpus, "--corpus");
  require_file(o.store, "--store");
  if (o.log.empty()) throw Error(Errc::ConfigError, "--log is required");
  const auto c = corpus::read_corpus(o.corpus);
  review::ReviewStore survey(o.log);
  const auto v1 = simplify::read_store(o.store);
  std::vector<path> inputs{o.corpus, o.store};

  std::vector<review::Task> tasks;
  if (o.round == 1) {
    tasks = review::make_tasks(select_records(c, o.split), v1);
  } else {
    require_file(o.store2, "--store2");
    inputs.push_back(o.store2);
    const auto v2 = simplify::read_store(o.store2);
    std::vector<corpus::CveRecord> recs;
    for (const auto& id : pending_after(survey, o.round - 1)) recs.push_back(record_for(c, id));
    tasks = review::make_tasks(recs, v1, v2);
  }
  const auto round = survey.create_round(o.round, std::move(tasks));
  ctx.out << "round " << round.number << " created with " << round.tasks.size() << " tasks and "
          << round.statements.size() << " statements\n";
}

void cmd_survey_serve(Context& ctx) {
  const auto& o = ctx.opt;
  if (o.log.empty()) throw Error(Errc::ConfigError, "--log is required");
  std::string token = o.admin_token;
  if (token.empty()) token = ctx.env("ATS_ADMIN_TOKEN").value_or("");
  review::ReviewStore survey(o.log);
  review::ReviewService service(survey, {o.static_dir, token});
  ctx.out << "serving " << o.log.string() << " on http://" << o.host << ':' << o.port << '\n' << std::flush;
  service.listen(o.host, o.port);
}

void cmd_survey_close(Context& ctx) {
  const auto& o = ctx.opt;
  require_file(o.log, "--log");
  require_out(o.out);
  review::ReviewStore survey(o.log);
  const auto result = survey.close_round(o.round);
  for (const auto& w : result.warnings) ctx.err << "warning: " << w << '\n';
  std::filesystem::create_directories(o.out);
  review::write_export(survey.export_round(o.round), o.round, o.out);
  write_manifest(o.out, manifest(ctx, "survey close", {o.log}, {o.out}));
  const auto accepted = std::count_if(result.decisions.begin(), result.decisions.end(),
                                      [](const auto& d) { return d.accepted; });
  ctx.out << "round " << o.round << " closed: " << accepted << " of " << result.decisions.size() << " accepted\n";
}

void cmd_round2_build(Context& ctx) {
  const auto& o = ctx.opt;
  require_file(o.corpus, "--corpus");
  require_file(o.store, "--store");
  require_file(o.log, "--log");
  require_out(o.out);
  const auto c = corpus::read_corpus(o.corpus);
  const auto v1_store = simplify::read_store(o.store);
  const review::ReviewStore survey(o.log);
  require_closed(survey, 1);
  const auto prompts = PromptSet::load(ctx.config.prompts_dir);
  OfflineChatClient offline;
  const simplify::Simplifier simplifier(offline, prompts);
  const auto comments = survey.comments(1);

  std::vector<std::string> lines;
  for (const auto& id : pending_after(survey, 1)) {
    const auto* v1 = version_for(v1_store, id);
    if (!v1) throw Error(Errc::ConfigError, id + " has no round-1 version in " + o.store.string());
    const auto it = comments.find(id);
    const std::vector<std::string> none;
    const auto messages = simplifier.build_round2_request(record_for(c, id), *v1, it == comments.end() ? none : it->second);
    json msgs = json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    lines.push_back(json{{"cve_id", id}, {"messages", std::move(msgs)}}.dump());
  }
  write_lines(o.out, lines);
  write_manifest(o.out, manifest(ctx, "round2 build", {o.corpus, o.store, o.log}, {o.out}, &prompts));
  ctx.out << lines.size() << " round-2 requests\n";
}

void cmd_report(Context& ctx) {
  const auto& o = ctx.opt;
  require_out(o.out);
  if (o.inputs.empty()) throw Error(Errc::ConfigError, "--inputs needs at least one system.csv");
  std::vector<metrics::SystemSummary> systems;
  for (const auto& p : o.inputs) {
    require_file(p, "--inputs");
    for (auto& s : metrics::parse_systems_csv(io::read_file(p))) systems.push_back(std::move(s));
  }
  std::filesystem::create_directories(o.out);
  const auto csv = o.out / "systems.csv";
  const auto md = o.out / "tables.md";
  io::write_file(csv, metrics::systems_csv(systems));
  io::write_file(md, metrics::systems_markdown(systems));
  write_manifest(o.out, manifest(ctx, "report", o.inputs, {csv, md}));
  ctx.out << "report for " << systems.size() << " systems\n";
}

}  // namespace ats::cli
