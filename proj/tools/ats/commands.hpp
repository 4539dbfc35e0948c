#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace ats::cli {

using std::filesystem::path;

struct Options {
  path input;
  path corpus;
  path out;
  path overrides;
  path lexicon;
  path simplified;
  path references;
  path previous;
  path log;
  path store;
  path store2;
  path static_dir;
  std::vector<path> inputs;
  std::vector<std::string> metrics{"all"};
  std::string mode = "document";
  std::string split = "auto";
  std::string system;
  std::string host = "127.0.0.1";
  std::string admin_token;
  std::size_t eval_n = 40;
  std::size_t dev_n = 60;
  int round = 1;
  int port = 8080;
  bool strict = false;
  path audit;
};

struct Context {
  RunConfig config;
  Options opt;
  std::ostream& out;
  std::ostream& err;
  Env env;
};

void cmd_ingest(Context& ctx);
void cmd_clean(Context& ctx);
void cmd_sample(Context& ctx);
void cmd_simplify(Context& ctx);
void cmd_explain(Context& ctx);
void cmd_evaluate(Context& ctx);
void cmd_lint(Context& ctx);
void cmd_survey_create(Context& ctx);
void cmd_survey_serve(Context& ctx);
void cmd_survey_close(Context& ctx);
void cmd_round2_build(Context& ctx);
void cmd_report(Context& ctx);

}  // namespace ats::cli
