#include "ats/review.hpp"

#include <ctime>
#include <mutex>
#include <set>

#include "ats/error.hpp"
#include "ats/io.hpp"
#include "review_json.hpp"

namespace ats::review {

using nlohmann::json;

std::string_view to_string(Answer answer) noexcept {
  switch (answer) {
    case Answer::Agree: return "agree";
    case Answer::Neutral: return "neutral";
    case Answer::Disagree: return "disagree";
  }
  return "neutral";
}

Answer answer_from_string(std::string_view name) {
  const std::string n = text::to_lower_ascii(text::trim(name));
  if (n == "agree") return Answer::Agree;
  if (n == "neutral" || n == "neither agree nor disagree") return Answer::Neutral;
  if (n == "disagree") return Answer::Disagree;
  throw Error(Errc::IncompleteAnswers, "unknown answer '" + std::string(name) + "'");
}

std::string_view to_string(AppliesTo target) noexcept {
  switch (target) {
    case AppliesTo::V1: return "v1";
    case AppliesTo::V2: return "v2";
    case AppliesTo::Comparison: return "comparison";
  }
  return "v1";
}

AppliesTo applies_to_from_string(std::string_view name) {
  if (name == "v1") return AppliesTo::V1;
  if (name == "v2") return AppliesTo::V2;
  if (name == "comparison") return AppliesTo::Comparison;
  throw Error(Errc::MalformedDocument, "unknown statement target '" + std::string(name) + "'");
}

std::string_view to_string(RoundStatus status) noexcept {
  return status == RoundStatus::Open ? "open" : "closed";
}

std::vector<Statement> default_statements(int round) {
  if (round <= 1) {
    return {{"easier", std::string(kEasierText), AppliesTo::V1, true},
            {"meaning", std::string(kMeaningText), AppliesTo::V1, true}};
  }
  return {{"easier_v1", std::string(kEasierText), AppliesTo::V1, false},
          {"meaning_v1", std::string(kMeaningText), AppliesTo::V1, false},
          {"easier_v2", std::string(kEasierText), AppliesTo::V2, true},
          {"meaning_v2", std::string(kMeaningText), AppliesTo::V2, true},
          {"comparison", std::string(kComparisonText), AppliesTo::Comparison, false}};
}

std::vector<Task> make_tasks(std::span<const corpus::CveRecord> records,
                             std::span<const simplify::SimplificationVersion> v1,
                             std::span<const simplify::SimplificationVersion> v2) {
  auto find = [](std::span<const simplify::SimplificationVersion> versions,
                 const std::string& id) -> const simplify::SimplificationVersion* {
    for (const auto& v : versions) {
      if (v.cve_id == id) return &v;
    }
    return nullptr;
  };
  auto shown = [](std::string label, const simplify::SimplificationVersion& v) {
    return ShownVersion{std::move(label), v.cve_id + "/r" + std::to_string(v.round), v.text};
  };

  std::vector<Task> tasks;
  for (const auto& rec : records) {
    Task t{rec.id, rec.cleaned_description, {}};
    const auto* first = find(v1, rec.id);
    if (!first) throw Error(Errc::UnknownTask, rec.id + " has no first version");
    t.versions.push_back(shown("v1", *first));
    if (!v2.empty()) {
      const auto* second = find(v2, rec.id);
      if (!second) throw Error(Errc::UnknownTask, rec.id + " has no second version");
      t.versions.push_back(shown("v2", *second));
    }
    tasks.push_back(std::move(t));
  }
  return tasks;
}

double StatementTally::agree_fraction() const noexcept {
  const auto n = total();
  return n == 0 ? 0.0 : static_cast<double>(agree) / static_cast<double>(n);
}

bool passes(std::span<const StatementTally> decisive) {
  if (decisive.empty()) return false;
  for (const auto& t : decisive) {
    // agree / total > 0.8 without floating point: 5 * agree > 4 * total.
    if (t.total() == 0 || t.disagree != 0 || 5 * t.agree <= 4 * t.total()) return false;
  }
  return true;
}

const Task* SurveyRound::find(std::string_view cve_id) const {
  for (const auto& t : tasks) {
    if (t.cve_id == cve_id) return &t;
  }
  return nullptr;
}

void write_export(const RoundExport& report, int round, const std::filesystem::path& dir) {
  io::write_file(dir / ("round" + std::to_string(round) + "_decisions.csv"), report.csv);
  for (const auto& [cve, body] : report.comments) io::write_file(dir / "comments" / (cve + ".txt"), body);
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

namespace detail {

json to_json(const Statement& s) {
  return {{"id", s.id}, {"text", s.text}, {"applies_to", std::string(to_string(s.applies_to))}, {"decisive", s.decisive}};
}

Statement statement_from_json(const json& j) {
  return {j.at("id").get<std::string>(), j.at("text").get<std::string>(),
          applies_to_from_string(j.value("applies_to", std::string("v1"))), j.value("decisive", true)};
}

json to_json(const Task& t) {
  json versions = json::array();
  for (const auto& v : t.versions) versions.push_back({{"label", v.label}, {"version_id", v.version_id}, {"text", v.text}});
  return {{"cve_id", t.cve_id}, {"original", t.original}, {"versions", std::move(versions)}};
}

Task task_from_json(const json& j) {
  Task t{j.at("cve_id").get<std::string>(), j.value("original", std::string()), {}};
  for (const auto& v : j.value("versions", json::array())) {
    t.versions.push_back({v.at("label").get<std::string>(), v.value("version_id", std::string()),
                          v.at("text").get<std::string>()});
  }
  return t;
}

json to_json(const SurveyResponse& r) {
  json answers = json::object();
  for (const auto& [id, a] : r.answers) answers[id] = std::string(to_string(a));
  json j = {{"reviewer_id", r.reviewer_id}, {"cve_id", r.cve_id}, {"round", r.round}, {"answers", std::move(answers)}};
  j["comment"] = r.comment ? json(*r.comment) : json(nullptr);
  if (!r.submitted_at.empty()) j["submitted_at"] = r.submitted_at;
  return j;
}

SurveyResponse response_from_json(const json& j) {
  SurveyResponse r;
  r.reviewer_id = j.at("reviewer_id").get<std::string>();
  r.cve_id = j.value("cve_id", std::string());
  r.round = j.value("round", 0);
  const auto& answers = j.at("answers");
  if (!answers.is_object()) throw Error(Errc::IncompleteAnswers, "answers must be an object");
  for (const auto& [id, a] : answers.items()) r.answers[id] = answer_from_string(a.get<std::string>());
  if (auto it = j.find("comment"); it != j.end() && it->is_string()) {
    const auto c = text::trim(it->get_ref<const std::string&>());
    if (!c.empty()) r.comment = std::string(c);
  }
  r.submitted_at = j.value("submitted_at", std::string());
  return r;
}

json to_json(const StatementTally& t) {
  return {{"statement_id", t.statement_id}, {"agree", t.agree},
          {"neutral", t.neutral},           {"disagree", t.disagree},
          {"agree_fraction", t.agree_fraction()}};
}

json to_json(const AcceptanceDecision& d) {
  json statements = json::array();
  for (const auto& t : d.statements) statements.push_back(to_json(t));
  return {{"cve_id", d.cve_id},
          {"round", d.round},
          {"accepted", d.accepted},
          {"response_count", d.response_count},
          {"statements", std::move(statements)}};
}

}  // namespace detail

ReviewStore::ReviewStore(std::filesystem::path log_path, Clock clock)
    : log_path_(std::move(log_path)), clock_(clock ? std::move(clock) : Clock(utc_timestamp)) {
  if (log_path_.empty() || !std::filesystem::exists(log_path_)) return;
  for (const auto& line : io::read_lines(log_path_)) {
    apply(line);
    log_.push_back(line);
  }
}

const ReviewStore::RoundState& ReviewStore::state(int number) const {
  const auto it = rounds_.find(number);
  if (it == rounds_.end()) throw Error(Errc::UnknownRound, "round " + std::to_string(number) + " does not exist");
  return it->second;
}

void ReviewStore::record(std::string_view kind, const std::string& payload_json) {
  json event = json::object();
  event["ts"] = clock_();
  event["kind"] = std::string(kind);
  event["payload"] = json::parse(payload_json);
  const std::string line = event.dump();
  if (!log_path_.empty()) io::append_line(log_path_, line);
  apply(line);
  log_.push_back(line);
}

void ReviewStore::apply(const std::string& line) {
  try {
    const json event = json::parse(line);
    const std::string ts = event.at("ts").get<std::string>();
    const std::string kind = event.at("kind").get<std::string>();
    const json& payload = event.at("payload");
    if (kind == "round_created") {
      RoundState st;
      st.round.number = payload.at("round").get<int>();
      st.round.created_at = ts;
      for (const auto& s : payload.at("statements")) st.round.statements.push_back(detail::statement_from_json(s));
      for (const auto& t : payload.at("tasks")) st.round.tasks.push_back(detail::task_from_json(t));
      rounds_[st.round.number] = std::move(st);
    } else if (kind == "response_submitted") {
      auto r = detail::response_from_json(payload);
      r.submitted_at = ts;
      auto& st = rounds_.at(r.round);
      st.responses[{r.cve_id, r.reviewer_id}] = std::move(r);
    } else if (kind == "round_closed") {
      auto& st = rounds_.at(payload.at("round").get<int>());
      st.round.status = RoundStatus::Closed;
      st.round.closed_at = ts;
    } else {
      throw Error(Errc::MalformedDocument, "unknown event kind '" + kind + "'");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::MalformedDocument, std::string("event log: ") + e.what());
  } catch (const std::out_of_range&) {
    throw Error(Errc::MalformedDocument, "event log refers to a round that was never created");
  }
}

SurveyRound ReviewStore::create_round(int number, std::vector<Task> tasks,
                                      std::optional<std::vector<Statement>> statements) {
  std::unique_lock lock(mutex_);
  if (number < 1) throw Error(Errc::InvalidRound, "round numbers start at 1");
  if (rounds_.count(number) != 0) throw Error(Errc::RoundExists, "round " + std::to_string(number) + " exists");
  if (tasks.empty()) throw Error(Errc::InvalidRound, "a round needs at least one task");

  const auto stmts = statements ? std::move(*statements) : default_statements(number);
  if (stmts.empty()) throw Error(Errc::InvalidRound, "a round needs at least one statement");
  std::set<std::string> ids;
  for (const auto& s : stmts) {
    if (s.id.empty() || !ids.insert(s.id).second) throw Error(Errc::InvalidRound, "duplicate or empty statement id");
  }

  const std::size_t needed_versions = number == 1 ? 1 : 2;
  std::set<std::string> cves;
  for (const auto& t : tasks) {
    if (!cves.insert(t.cve_id).second) throw Error(Errc::InvalidRound, "duplicate task " + t.cve_id);
    if (t.versions.size() < needed_versions) {
      throw Error(Errc::InvalidRound, t.cve_id + " needs " + std::to_string(needed_versions) + " versions");
    }
  }

  if (number > 1) {
    const auto& prev = state(number - 1);
    if (prev.round.status != RoundStatus::Closed) {
      throw Error(Errc::RoundOpen, "round " + std::to_string(number - 1) + " is still open");
    }
    std::set<std::string> accepted;
    for (const auto& d : decide(prev)) {
      if (d.accepted) accepted.insert(d.cve_id);
    }
    for (const auto& t : tasks) {
      if (!prev.round.find(t.cve_id)) {
        throw Error(Errc::UnknownTask, t.cve_id + " was not part of round " + std::to_string(number - 1));
      }
      if (accepted.count(t.cve_id) != 0) {
        throw Error(Errc::AcceptedDocIncluded, t.cve_id + " was accepted in round " + std::to_string(number - 1));
      }
    }
  }

  json payload = {{"round", number}, {"statements", json::array()}, {"tasks", json::array()}};
  for (const auto& s : stmts) payload["statements"].push_back(detail::to_json(s));
  for (const auto& t : tasks) payload["tasks"].push_back(detail::to_json(t));
  record("round_created", payload.dump());
  return rounds_.at(number).round;
}

SurveyResponse ReviewStore::submit_response(SurveyResponse response) {
  std::unique_lock lock(mutex_);
  const auto& st = state(response.round);
  if (st.round.status == RoundStatus::Closed) {
    throw Error(Errc::RoundClosed, "round " + std::to_string(response.round) + " is closed");
  }
  if (!st.round.find(response.cve_id)) {
    throw Error(Errc::UnknownTask, response.cve_id + " is not a task of round " + std::to_string(response.round));
  }
  if (text::trim(response.reviewer_id).empty()) throw Error(Errc::IncompleteAnswers, "reviewer id is empty");
  for (const auto& s : st.round.statements) {
    if (response.answers.count(s.id) == 0) throw Error(Errc::IncompleteAnswers, "no answer for statement " + s.id);
  }
  if (response.answers.size() != st.round.statements.size()) {
    throw Error(Errc::IncompleteAnswers, "answers name a statement that is not part of the round");
  }
  if (response.comment) {
    const auto c = text::trim(*response.comment);
    response.comment = c.empty() ? std::nullopt : std::optional<std::string>(std::string(c));
  }
  response.submitted_at.clear();
  record("response_submitted", detail::to_json(response).dump());
  return rounds_.at(response.round).responses.at({response.cve_id, response.reviewer_id});
}

std::vector<AcceptanceDecision> ReviewStore::decide(const RoundState& st) const {
  std::vector<AcceptanceDecision> out;
  for (const auto& task : st.round.tasks) {
    AcceptanceDecision d;
    d.cve_id = task.cve_id;
    d.round = st.round.number;
    for (const auto& s : st.round.statements) d.statements.push_back({s.id, 0, 0, 0});
    for (auto it = st.responses.lower_bound({task.cve_id, ""}); it != st.responses.end() && it->first.first == task.cve_id;
         ++it) {
      ++d.response_count;
      for (std::size_t i = 0; i < st.round.statements.size(); ++i) {
        switch (it->second.answers.at(st.round.statements[i].id)) {
          case Answer::Agree: ++d.statements[i].agree; break;
          case Answer::Neutral: ++d.statements[i].neutral; break;
          case Answer::Disagree: ++d.statements[i].disagree; break;
        }
      }
    }
    std::vector<StatementTally> decisive;
    for (std::size_t i = 0; i < st.round.statements.size(); ++i) {
      if (st.round.statements[i].decisive) decisive.push_back(d.statements[i]);
    }
    d.accepted = d.response_count > 0 && passes(decisive);
    out.push_back(std::move(d));
  }
  return out;
}

CloseResult ReviewStore::close_round(int number) {
  std::unique_lock lock(mutex_);
  const auto& st = state(number);
  if (st.round.status == RoundStatus::Closed) {
    throw Error(Errc::RoundClosed, "round " + std::to_string(number) + " is already closed");
  }
  CloseResult result;
  result.decisions = decide(st);
  for (const auto& d : result.decisions) {
    if (d.response_count == 0) result.warnings.push_back(d.cve_id + ": no responses, marked not accepted");
  }
  json payload = {{"round", number}, {"accepted", json::array()}};
  for (const auto& d : result.decisions) {
    if (d.accepted) payload["accepted"].push_back(d.cve_id);
  }
  record("round_closed", payload.dump());
  lock.unlock();
  result.comments = comments(number);
  return result;
}

std::vector<SurveyRound> ReviewStore::rounds() const {
  std::shared_lock lock(mutex_);
  std::vector<SurveyRound> out;
  for (const auto& [n, st] : rounds_) out.push_back(st.round);
  return out;
}

SurveyRound ReviewStore::round(int number) const {
  std::shared_lock lock(mutex_);
  return state(number).round;
}

std::vector<SurveyResponse> ReviewStore::responses(int number) const {
  std::shared_lock lock(mutex_);
  std::vector<SurveyResponse> out;
  for (const auto& [key, r] : state(number).responses) out.push_back(r);
  return out;
}

std::vector<AcceptanceDecision> ReviewStore::decisions(int number) const {
  std::shared_lock lock(mutex_);
  return decide(state(number));
}

std::map<std::string, std::vector<std::string>> ReviewStore::comments(int number) const {
  std::shared_lock lock(mutex_);
  const auto& st = state(number);
  std::map<std::string, std::vector<std::string>> out;
  for (const auto& task : st.round.tasks) out[task.cve_id];
  for (const auto& [key, r] : st.responses) {
    if (r.comment) out[key.first].push_back(*r.comment);
  }
  return out;
}

RoundExport ReviewStore::export_round(int number) const {
  std::shared_lock lock(mutex_);
  const auto& st = state(number);
  if (st.round.status != RoundStatus::Closed) {
    throw Error(Errc::RoundOpen, "round " + std::to_string(number) + " is still open");
  }
  RoundExport out;
  out.csv = "cve_id,statement_id,agree,neutral,disagree,agree_fraction,accepted\n";
  for (const auto& d : decide(st)) {
    for (const auto& t : d.statements) {
      out.csv += d.cve_id + ',' + t.statement_id + ',' + std::to_string(t.agree) + ',' + std::to_string(t.neutral) + ',' +
                 std::to_string(t.disagree) + ',' + io::format_fixed(t.agree_fraction(), 4) + ',' +
                 (d.accepted ? "true" : "false") + '\n';
    }
  }
  for (const auto& task : st.round.tasks) out.comments[task.cve_id];
  for (const auto& [key, r] : st.responses) {
    if (r.comment) out.comments[key.first] += "- " + *r.comment + '\n';
  }
  return out;
}

std::string ReviewStore::state_json() const {
  std::shared_lock lock(mutex_);
  json rounds = json::array();
  for (const auto& [n, st] : rounds_) {
    json r = {{"number", n},
              {"status", std::string(to_string(st.round.status))},
              {"created_at", st.round.created_at},
              {"closed_at", st.round.closed_at},
              {"statements", json::array()},
              {"tasks", json::array()},
              {"responses", json::array()},
              {"decisions", json::array()}};
    for (const auto& s : st.round.statements) r["statements"].push_back(detail::to_json(s));
    for (const auto& t : st.round.tasks) r["tasks"].push_back(detail::to_json(t));
    for (const auto& [key, resp] : st.responses) r["responses"].push_back(detail::to_json(resp));
    for (const auto& d : decide(st)) r["decisions"].push_back(detail::to_json(d));
    rounds.push_back(std::move(r));
  }
  return json{{"rounds", std::move(rounds)}}.dump();
}

std::vector<std::string> ReviewStore::log_lines() const {
  std::shared_lock lock(mutex_);
  return log_;
}

}  // namespace ats::review
