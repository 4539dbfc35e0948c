#include <gtest/gtest.h>

#include <random>

#include <json.hpp>

#include "ats/error.hpp"
#include "ats/io.hpp"
#include "ats/review.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ats;
using namespace ats::review;
using ats::testing::errc_of;
using ats::testing::TempDir;

namespace {

std::string cve(int i) { return "CVE-2025-" + std::to_string(1000 + i); }

std::vector<Task> round1_tasks(int n) {
  std::vector<Task> out;
  for (int i = 0; i < n; ++i) out.push_back({cve(i), "Original " + std::to_string(i), {{"v1", cve(i) + "/r1", "Simple"}}});
  return out;
}

std::vector<Task> round2_tasks(const std::vector<std::string>& ids) {
  std::vector<Task> out;
  for (const auto& id : ids) out.push_back({id, "Original", {{"v1", id + "/r1", "S1"}, {"v2", id + "/r2", "S2"}}});
  return out;
}

SurveyResponse answer_all(const std::string& reviewer, const std::string& cve_id, int round,
                          const std::vector<Statement>& statements, Answer a, std::optional<std::string> comment = {}) {
  SurveyResponse r{reviewer, cve_id, round, {}, std::move(comment), {}};
  for (const auto& s : statements) r.answers[s.id] = a;
  return r;
}

ReviewStore::Clock fixed_clock() {
  return [] { return std::string("2025-06-01T00:00:00Z"); };
}

}  // namespace

TEST(statements_test, defaults) {
  const auto r1 = default_statements(1);
  ASSERT_EQ(2u, r1.size());
  EXPECT_EQ(std::string(kEasierText), r1[0].text);
  EXPECT_EQ(std::string(kMeaningText), r1[1].text);
  const auto r2 = default_statements(2);
  ASSERT_EQ(5u, r2.size());
  EXPECT_EQ(std::string(kComparisonText), r2.back().text);
  EXPECT_EQ("The second round simplification is of better quality than the first", r2.back().text);
  std::size_t decisive = 0;
  for (const auto& s : r2) decisive += s.decisive;
  EXPECT_EQ(2u, decisive);
}

TEST(answers_test, parsing) {
  EXPECT_EQ(Answer::Neutral, answer_from_string("neither agree nor disagree"));
  EXPECT_EQ(Answer::Agree, answer_from_string("agree"));
  EXPECT_EQ(Errc::IncompleteAnswers, errc_of([] { answer_from_string("maybe"); }));
}

TEST(passes_test, strict_threshold) {
  EXPECT_TRUE(passes(std::vector<StatementTally>{{"a", 9, 1, 0}, {"b", 9, 1, 0}}));
  EXPECT_FALSE(passes(std::vector<StatementTally>{{"a", 10, 1, 1}}));
  EXPECT_FALSE(passes(std::vector<StatementTally>{{"a", 8, 2, 0}}));
  EXPECT_FALSE(passes(std::vector<StatementTally>{{"a", 4, 1, 0}}));
  EXPECT_TRUE(passes(std::vector<StatementTally>{{"a", 5, 1, 0}}));
  EXPECT_FALSE(passes(std::vector<StatementTally>{{"a", 0, 0, 0}}));
}

TEST(make_tasks_test, pairs_versions) {
  const std::vector<corpus::CveRecord> recs{ats::testing::make_record(cve(0), "o0"), ats::testing::make_record(cve(1), "o1")};
  std::vector<simplify::SimplificationVersion> v1(2), v2(1);
  v1[0].cve_id = cve(1);
  v1[0].text = "s1";
  v1[1].cve_id = cve(0);
  v1[1].text = "s0";
  const auto tasks = make_tasks(recs, v1);
  ASSERT_EQ(2u, tasks.size());
  EXPECT_EQ(cve(0), tasks[0].cve_id);
  EXPECT_EQ("s0", tasks[0].versions.at(0).text);
  EXPECT_EQ(cve(0) + "/r1", tasks[0].versions.at(0).version_id);
  v2[0].cve_id = cve(0);
  v2[0].round = 2;
  EXPECT_EQ(Errc::UnknownTask, errc_of([&] { make_tasks(recs, v1, v2); }));
}

TEST(review_store_test, forty_tasks_two_statements) {
  ReviewStore store({}, fixed_clock());
  const auto r = store.create_round(1, round1_tasks(40));
  EXPECT_EQ(40u, r.tasks.size());
  EXPECT_EQ(2u, r.statements.size());
  EXPECT_EQ(RoundStatus::Open, r.status);
  EXPECT_EQ(Errc::RoundExists, errc_of([&] { store.create_round(1, round1_tasks(1)); }));
}

TEST(review_store_test, submit_validation) {
  ReviewStore store({}, fixed_clock());
  const auto st = store.create_round(1, round1_tasks(2)).statements;
  auto ok = answer_all("r1", cve(0), 1, st, Answer::Agree, "  Nice work.  ");
  const auto stored = store.submit_response(ok);
  EXPECT_EQ("Nice work.", stored.comment);
  EXPECT_EQ("2025-06-01T00:00:00Z", stored.submitted_at);

  auto missing = ok;
  missing.answers.erase("meaning");
  EXPECT_EQ(Errc::IncompleteAnswers, errc_of([&] { store.submit_response(missing); }));
  auto extra = ok;
  extra.answers["comparison"] = Answer::Agree;
  EXPECT_EQ(Errc::IncompleteAnswers, errc_of([&] { store.submit_response(extra); }));
  auto unknown = ok;
  unknown.cve_id = cve(9);
  EXPECT_EQ(Errc::UnknownTask, errc_of([&] { store.submit_response(unknown); }));
  auto bad_round = ok;
  bad_round.round = 3;
  EXPECT_EQ(Errc::UnknownRound, errc_of([&] { store.submit_response(bad_round); }));

  store.close_round(1);
  EXPECT_EQ(Errc::RoundClosed, errc_of([&] { store.submit_response(ok); }));
  EXPECT_EQ(Errc::RoundClosed, errc_of([&] { store.close_round(1); }));
}

TEST(review_store_test, resubmission_latest_wins_and_log_keeps_both) {
  ReviewStore store({}, fixed_clock());
  const auto st = store.create_round(1, round1_tasks(1)).statements;
  store.submit_response(answer_all("r1", cve(0), 1, st, Answer::Disagree));
  store.submit_response(answer_all("r1", cve(0), 1, st, Answer::Agree));
  const auto responses = store.responses(1);
  ASSERT_EQ(1u, responses.size());
  EXPECT_EQ(Answer::Agree, responses[0].answers.at("easier"));
  std::size_t submitted = 0;
  for (const auto& l : store.log_lines()) submitted += l.find("\"response_submitted\"") != std::string::npos;
  EXPECT_EQ(2u, submitted);
}

TEST(review_store_test, close_decisions_and_warnings) {
  ReviewStore store({}, fixed_clock());
  const auto st = store.create_round(1, round1_tasks(3)).statements;
  for (int i = 0; i < 9; ++i) store.submit_response(answer_all("a" + std::to_string(i), cve(0), 1, st, Answer::Agree));
  store.submit_response(answer_all("n", cve(0), 1, st, Answer::Neutral, "ok"));
  for (int i = 0; i < 10; ++i) store.submit_response(answer_all("a" + std::to_string(i), cve(1), 1, st, Answer::Agree));
  store.submit_response(answer_all("n", cve(1), 1, st, Answer::Neutral));
  store.submit_response(answer_all("d", cve(1), 1, st, Answer::Disagree, "wrong"));

  const auto result = store.close_round(1);
  ASSERT_EQ(3u, result.decisions.size());
  EXPECT_TRUE(result.decisions[0].accepted);
  EXPECT_EQ(10u, result.decisions[0].response_count);
  EXPECT_DOUBLE_EQ(0.9, result.decisions[0].statements[0].agree_fraction());
  EXPECT_FALSE(result.decisions[1].accepted);
  EXPECT_FALSE(result.decisions[2].accepted);
  EXPECT_EQ(0u, result.decisions[2].response_count);
  ASSERT_EQ(1u, result.warnings.size());
  EXPECT_NE(std::string::npos, result.warnings[0].find(cve(2)));
  EXPECT_EQ((std::vector<std::string>{"ok"}), result.comments.at(cve(0)));
  EXPECT_EQ((std::vector<std::string>{"wrong"}), result.comments.at(cve(1)));
}

TEST(review_store_test, exactly_eighty_percent_rejected) {
  ReviewStore store({}, fixed_clock());
  const auto st = store.create_round(1, round1_tasks(1)).statements;
  for (int i = 0; i < 8; ++i) store.submit_response(answer_all("a" + std::to_string(i), cve(0), 1, st, Answer::Agree));
  for (int i = 0; i < 2; ++i) store.submit_response(answer_all("n" + std::to_string(i), cve(0), 1, st, Answer::Neutral));
  EXPECT_FALSE(store.close_round(1).decisions[0].accepted);
}

TEST(review_store_test, export_shape) {
  ReviewStore store({}, fixed_clock());
  const auto st = store.create_round(1, round1_tasks(2)).statements;
  EXPECT_EQ(Errc::RoundOpen, errc_of([&] { store.export_round(1); }));
  store.submit_response(answer_all("r", cve(0), 1, st, Answer::Agree, "fine"));
  store.close_round(1);
  const auto ex = store.export_round(1);
  EXPECT_EQ("cve_id,statement_id,agree,neutral,disagree,agree_fraction,accepted\n"
            "CVE-2025-1000,easier,1,0,0,1.0000,true\n"
            "CVE-2025-1000,meaning,1,0,0,1.0000,true\n"
            "CVE-2025-1001,easier,0,0,0,0.0000,false\n"
            "CVE-2025-1001,meaning,0,0,0,0.0000,false\n",
            ex.csv);
  EXPECT_EQ("- fine\n", ex.comments.at(cve(0)));

  TempDir dir;
  write_export(ex, 1, dir.path());
  EXPECT_EQ(ex.csv, ats::testing::read_text(dir / "round1_decisions.csv"));
  EXPECT_EQ("- fine\n", ats::testing::read_text(dir.path() / "comments" / (cve(0) + ".txt")));
}

TEST(review_store_test, forty_tasks_five_accepted_then_round_two) {
  ReviewStore store({}, fixed_clock());
  const auto st = store.create_round(1, round1_tasks(40)).statements;
  for (int i = 0; i < 40; ++i) {
    for (int r = 0; r < 6; ++r) {
      const Answer a = i < 5 ? Answer::Agree : (r == 0 ? Answer::Disagree : Answer::Agree);
      store.submit_response(answer_all("rev" + std::to_string(r), cve(i), 1, st, a, i >= 5 && r == 0 ? std::optional<std::string>("fix it") : std::nullopt));
    }
  }
  const auto result = store.close_round(1);
  std::vector<std::string> rejected;
  std::size_t accepted = 0;
  for (const auto& d : result.decisions) {
    if (d.accepted) {
      ++accepted;
    } else {
      rejected.push_back(d.cve_id);
    }
  }
  EXPECT_EQ(5u, accepted);
  const auto csv = store.export_round(1).csv;
  std::size_t true_rows = 0;
  for (auto pos = csv.find(",true\n"); pos != std::string::npos; pos = csv.find(",true\n", pos + 1)) ++true_rows;
  EXPECT_EQ(10u, true_rows);

  auto with_accepted = rejected;
  with_accepted.push_back(cve(0));
  EXPECT_EQ(Errc::AcceptedDocIncluded, errc_of([&] { store.create_round(2, round2_tasks(with_accepted)); }));
  const auto r2 = store.create_round(2, round2_tasks(rejected));
  EXPECT_EQ(35u, r2.tasks.size());
  EXPECT_EQ(5u, r2.statements.size());
}

TEST(review_store_test, round_two_preconditions) {
  ReviewStore store({}, fixed_clock());
  EXPECT_EQ(Errc::UnknownRound, errc_of([&] { store.create_round(2, round2_tasks({cve(0)})); }));
  store.create_round(1, round1_tasks(2));
  EXPECT_EQ(Errc::RoundOpen, errc_of([&] { store.create_round(2, round2_tasks({cve(0)})); }));
  store.close_round(1);
  EXPECT_EQ(Errc::UnknownTask, errc_of([&] { store.create_round(2, round2_tasks({cve(7)})); }));
  EXPECT_EQ(Errc::InvalidRound, errc_of([&] { store.create_round(2, round1_tasks(1)); }));
  EXPECT_EQ(Errc::InvalidRound, errc_of([&] { store.create_round(0, round1_tasks(1)); }));
}

TEST(review_store_test, replay_is_identical) {
  TempDir dir;
  const auto log = dir / "events.jsonl";
  std::string before;
  {
    ReviewStore store(log);
    const auto st = store.create_round(1, round1_tasks(3)).statements;
    store.submit_response(answer_all("r1", cve(0), 1, st, Answer::Agree, "good"));
    store.submit_response(answer_all("r2", cve(0), 1, st, Answer::Neutral));
    store.submit_response(answer_all("r1", cve(1), 1, st, Answer::Disagree, "bad"));
    store.submit_response(answer_all("r1", cve(1), 1, st, Answer::Agree));
    store.close_round(1);
    store.create_round(2, round2_tasks({cve(0), cve(2)}));
    before = store.state_json();
    EXPECT_EQ(store.log_lines().size(), io::read_lines(log).size());
  }
  ReviewStore replayed(log);
  EXPECT_EQ(before, replayed.state_json());
  EXPECT_EQ(2u, replayed.rounds().size());
  for (const auto& line : io::read_lines(log)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_TRUE(j.contains("ts") && j.contains("kind") && j.contains("payload"));
  }
}

TEST(review_store_test, randomized_decisions_match_oracle) {
  std::mt19937 rng(1234);
  for (int trial = 0; trial < 100; ++trial) {
    ReviewStore store({}, fixed_clock());
    const auto st = store.create_round(1, round1_tasks(5)).statements;
    std::map<std::string, std::vector<std::map<std::string, Answer>>> given;
    for (int t = 0; t < 5; ++t) {
      const int reviewers = static_cast<int>(rng() % 12);
      for (int r = 0; r < reviewers; ++r) {
        SurveyResponse resp{"r" + std::to_string(r), cve(t), 1, {}, {}, {}};
        for (const auto& s : st) {
          const auto roll = rng() % 20;
          resp.answers[s.id] = roll < 17 ? Answer::Agree : roll < 19 ? Answer::Neutral : Answer::Disagree;
        }
        given[cve(t)].push_back(resp.answers);
        store.submit_response(resp);
      }
    }
    for (const auto& d : store.close_round(1).decisions) {
      EXPECT_EQ(ats::testing::naive_accept(given[d.cve_id], {"easier", "meaning"}), d.accepted);
    }
  }
}

TEST(review_store_test, round_two_uses_v2_statements) {
  ReviewStore store({}, fixed_clock());
  store.create_round(1, round1_tasks(1));
  store.close_round(1);
  const auto st = store.create_round(2, round2_tasks({cve(0)})).statements;
  SurveyResponse resp{"r", cve(0), 2, {}, {}, {}};
  for (const auto& s : st) resp.answers[s.id] = s.decisive ? Answer::Agree : Answer::Disagree;
  store.submit_response(resp);
  EXPECT_TRUE(store.close_round(2).decisions[0].accepted);
}
