#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <ostream>

#include "ats/error.hpp"
#include "commands.hpp"

namespace ats::cli {
namespace {

struct Overrides {
  std::optional<std::string> seed;
  std::optional<std::string> prompts;
  std::optional<std::string> parallel;
  std::optional<std::string> strategy;
  std::optional<std::string> k;
  std::optional<std::string> max_n;
};

int exit_code(Errc code) {
  return code == Errc::ConfigError || code == Errc::UnknownCommand ? 2 : 1;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err, const Env& env) {
  CLI::App app{"Simplify, evaluate and review CVE descriptions.", "ats"};
  app.fallthrough();
  app.require_subcommand(1);

  Options opt;
  Overrides ov;
  std::optional<std::string> config_file;
  app.add_option("--config", config_file, "key = value configuration file");
  app.add_option("--seed", ov.seed, "seed for every random choice");
  app.add_option("--prompts", ov.prompts, "prompt template directory");
  app.add_option("--parallel", ov.parallel, "maximum concurrent model calls");

  std::map<CLI::App*, std::function<void(Context&)>> handlers;
  auto command = [&](CLI::App* parent, const std::string& name, const std::string& help,
                     std::function<void(Context&)> fn) {
    auto* sub = parent->add_subcommand(name, help);
    if (fn) handlers[sub] = std::move(fn);
    return sub;
  };
  auto strategy_opts = [&](CLI::App* sub) {
    sub->add_option("--strategy", ov.strategy, "term extraction: lexicon, ner or union");
    sub->add_option("--k", ov.k, "lexicon entries retrieved per term");
  };
  auto split_opt = [&](CLI::App* sub) {
    sub->add_option("--split", opt.split, "eval, dev, all, or auto (eval when sampled)")
        ->check(CLI::IsMember({"auto", "eval", "dev", "all"}));
  };

  auto* ingest = command(&app, "ingest", "Parse CVE JSON records into a corpus file", cmd_ingest);
  ingest->add_option("--input", opt.input, "directory of CVE JSON 5 records")->required();
  ingest->add_option("--out", opt.out, "corpus JSON lines")->required();

  auto* clean = command(&app, "clean", "Remove log excerpts and other non-language lines", cmd_clean);
  clean->add_option("--corpus", opt.corpus)->required();
  clean->add_option("--out", opt.out)->required();
  clean->add_option("--overrides", opt.overrides, "manual span overrides (JSON lines)");

  auto* sample = command(&app, "sample", "Partition into evaluation and development sets", cmd_sample);
  sample->add_option("--corpus", opt.corpus)->required();
  sample->add_option("--out", opt.out)->required();
  sample->add_option("--eval", opt.eval_n, "records for human evaluation")->capture_default_str();
  sample->add_option("--dev", opt.dev_n, "records for development")->capture_default_str();

  auto* simplify = command(&app, "simplify", "Simplify records with a chat model", cmd_simplify);
  simplify->add_option("--corpus", opt.corpus)->required();
  simplify->add_option("--out", opt.out, "simplification store (JSON lines)")->required();
  simplify->add_option("--mode", opt.mode)->check(CLI::IsMember({"sentence", "document", "agent"}))->capture_default_str();
  simplify->add_option("--round", opt.round, "1, or 2 to resimplify from survey feedback")->capture_default_str();
  simplify->add_option("--lexicon", opt.lexicon, "lexicon for agent mode");
  simplify->add_option("--audit", opt.audit, "agent audit trail (default <out>.audit.jsonl)");
  simplify->add_option("--previous", opt.previous, "round-1 store (round 2)");
  simplify->add_option("--log", opt.log, "survey event log (round 2)");
  split_opt(simplify);
  strategy_opts(simplify);

  auto* explain = command(&app, "explain", "Extract terms and explain them from the lexicon", cmd_explain);
  explain->add_option("--corpus", opt.corpus)->required();
  explain->add_option("--lexicon", opt.lexicon)->required();
  explain->add_option("--out", opt.out)->required();
  split_opt(explain);
  strategy_opts(explain);

  auto* evaluate = command(&app, "evaluate", "Compute automatic metrics", cmd_evaluate);
  evaluate->add_option("--corpus", opt.corpus)->required();
  evaluate->add_option("--simplified", opt.simplified, "store to evaluate (default: the originals)");
  evaluate->add_option("--references", opt.references, "reference simplifications {cve_id, text}");
  evaluate->add_option("--metrics", opt.metrics, "dsari bertscore semsim fkgl simplicity ne all")
      ->delimiter(',')
      ->capture_default_str();
  evaluate->add_option("--system", opt.system, "system name in the report");
  evaluate->add_option("--lexicon", opt.lexicon, "lexicon for named-entity counts");
  evaluate->add_option("--max-n", ov.max_n, "largest n-gram order for D-SARI");
  evaluate->add_option("--out", opt.out, "output directory")->required();
  split_opt(evaluate);
  strategy_opts(evaluate);

  auto* lint = command(&app, "lint", "Check version and identifier fidelity", cmd_lint);
  lint->add_option("--corpus", opt.corpus)->required();
  lint->add_option("--simplified", opt.simplified)->required();
  lint->add_option("--out", opt.out, "findings (JSON lines); stdout when omitted");
  lint->add_flag("--strict", opt.strict, "exit non-zero when anything is found");

  auto* survey = command(&app, "survey", "Human review rounds", nullptr);
  survey->require_subcommand(1);
  auto* create = command(survey, "create", "Create a review round", cmd_survey_create);
  create->add_option("--log", opt.log)->required();
  create->add_option("--round", opt.round)->capture_default_str();
  create->add_option("--corpus", opt.corpus)->required();
  create->add_option("--store", opt.store, "round-1 simplifications")->required();
  create->add_option("--store2", opt.store2, "round-2 simplifications (round 2)");
  split_opt(create);
  auto* serve = command(survey, "serve", "Serve the review API and web UI", cmd_survey_serve);
  serve->add_option("--log", opt.log)->required();
  serve->add_option("--static", opt.static_dir, "web UI bundle served at /");
  serve->add_option("--host", opt.host)->capture_default_str();
  serve->add_option("--port", opt.port)->capture_default_str();
  serve->add_option("--admin-token", opt.admin_token, "token for closing rounds (or ATS_ADMIN_TOKEN)");
  auto* close = command(survey, "close", "Close a round and export decisions", cmd_survey_close);
  close->add_option("--log", opt.log)->required();
  close->add_option("--round", opt.round)->capture_default_str();
  close->add_option("--out", opt.out, "export directory")->required();

  auto* round2 = command(&app, "round2", "Round-2 resimplification packages", nullptr);
  round2->require_subcommand(1);
  auto* build = command(round2, "build", "Write round-2 requests for rejected records", cmd_round2_build);
  build->add_option("--corpus", opt.corpus)->required();
  build->add_option("--store", opt.store, "round-1 simplifications")->required();
  build->add_option("--log", opt.log, "survey event log")->required();
  build->add_option("--out", opt.out)->required();

  auto* report = command(&app, "report", "Combine system summaries into tables", cmd_report);
  report->add_option("--inputs", opt.inputs, "system.csv files from evaluate")->required();
  report->add_option("--out", opt.out, "output directory")->required();

  if (args.empty()) {
    err << app.help();
    return 2;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
  const auto handler = handlers.find(const_cast<CLI::App*>(leaf));
  if (handler == handlers.end()) {
    err << "ats: error: UnknownCommand: " << leaf->get_name() << '\n';
    return 2;
  }

  try {
    RunConfig cfg = load_config(config_file ? std::optional<path>(*config_file) : std::nullopt, env);
    if (ov.seed) cfg.set("seed", *ov.seed);
    if (ov.prompts) cfg.set("prompts_dir", *ov.prompts);
    if (ov.parallel) cfg.set("parallel", *ov.parallel);
    if (ov.strategy) cfg.set("strategy", *ov.strategy);
    if (ov.k) cfg.set("k", *ov.k);
    if (ov.max_n) cfg.set("max_n", *ov.max_n);
    Context ctx{std::move(cfg), std::move(opt), out, err, env};
    handler->second(ctx);
    return 0;
  } catch (const Error& e) {
    err << "ats: error: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "ats: error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ats::cli
