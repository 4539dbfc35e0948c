#include <gtest/gtest.h>

#include <random>

#include "ats/error.hpp"
#include "ats/metrics.hpp"
#include "fixtures.hpp"

using namespace ats;
using namespace ats::metrics;
using ats::testing::errc_of;

namespace {

DocumentRow row(std::string id, std::initializer_list<std::pair<std::string_view, double>> values) {
  DocumentRow r;
  r.id = std::move(id);
  for (const auto& [k, v] : values) r.set(k, v);
  return r;
}

}  // namespace

TEST(aggregate_report_test, mean_of_two) {
  const auto r = aggregate_report("sys", {row("a", {{column::kDsari, 0.1}}), row("b", {{column::kDsari, 0.2}})});
  ASSERT_EQ(1u, r.means.size());
  EXPECT_NEAR(0.15, r.means[0], 1e-12);
}

TEST(aggregate_report_test, single_row) {
  const auto r = aggregate_report("sys", {row("a", {{column::kFkgl, 12.45}, {column::kWords, 43.0}})});
  EXPECT_DOUBLE_EQ(12.45, *r.summary().find(column::kFkgl));
  EXPECT_DOUBLE_EQ(43.0, *r.summary().find(column::kWords));
}

TEST(aggregate_report_test, forty_rows_against_recomputation) {
  std::mt19937 rng(40);
  std::uniform_real_distribution<double> u(-5.0, 20.0);
  std::vector<DocumentRow> rows;
  std::vector<std::vector<double>> raw(3);
  for (int i = 0; i < 40; ++i) {
    const double a = u(rng), b = u(rng), c = u(rng);
    raw[0].push_back(a);
    raw[1].push_back(b);
    raw[2].push_back(c);
    rows.push_back(row("CVE-2025-" + std::to_string(1000 + i), {{column::kFkgl, a}, {column::kDsari, b}, {column::kSemSim, c}}));
  }
  const auto report = aggregate_report("sys", rows);
  const auto summary = report.summary();
  const std::vector<std::string_view> names{column::kFkgl, column::kDsari, column::kSemSim};
  for (std::size_t k = 0; k < names.size(); ++k) {
    long double sum = 0;
    for (double v : raw[k]) sum += v;
    EXPECT_NEAR(static_cast<double>(sum / 40.0L), *summary.find(names[k]), 1e-12);
  }
  EXPECT_EQ((std::vector<std::string>{"d_sari", "semantic_similarity", "fkgl"}), report.columns);
}

TEST(aggregate_report_test, errors) {
  EXPECT_EQ(Errc::EmptyInput, errc_of([] { aggregate_report("sys", {}); }));
  EXPECT_EQ(Errc::MismatchedColumns, errc_of([] {
              aggregate_report("sys", {row("a", {{column::kFkgl, 1}}), row("b", {{column::kDsari, 1}})});
            }));
}

TEST(report_emitters_test, csv_round_trip_and_tables) {
  const auto a = aggregate_report("gpt", {row("x", {{column::kDsari, 0.09}, {column::kFkgl, 8.5}})}).summary();
  const auto b = aggregate_report("gemma, agent", {row("x", {{column::kBertF1, 0.91}})}).summary();
  const std::vector<SystemSummary> systems{a, b};
  const auto csv = systems_csv(systems);
  EXPECT_EQ(0u, csv.find("system,documents,d_sari,bertscore_f1,fkgl\n"));
  const auto parsed = parse_systems_csv(csv);
  ASSERT_EQ(2u, parsed.size());
  EXPECT_EQ("gemma, agent", parsed[1].system);
  EXPECT_DOUBLE_EQ(0.91, *parsed[1].find(column::kBertF1));
  EXPECT_EQ(nullptr, parsed[1].find(column::kDsari));

  const auto md = systems_markdown(parsed);
  const auto t1 = md.find("System level D-SARI scores");
  const auto t2 = md.find("System level scores for meaning preservation");
  const auto t3 = md.find("System level scores for simplicity");
  ASSERT_NE(std::string::npos, t1);
  ASSERT_LT(t1, t2);
  ASSERT_LT(t2, t3);
  EXPECT_NE(std::string::npos, md.find("| gpt | 0.09 |"));
  EXPECT_NE(std::string::npos, md.find("Average number of syllables per word"));
}

TEST(report_emitters_test, documents_csv) {
  const auto r = aggregate_report("s", {row("CVE-2025-0001", {{column::kFkgl, -0.5}})});
  EXPECT_EQ("system,id,fkgl\ns,CVE-2025-0001,-0.5\n", documents_csv(r));
}
