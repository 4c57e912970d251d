#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "captrans/reporting.hpp"
#include "captrans/solver.hpp"
#include "tiny.hpp"

using namespace captrans;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "captrans_test_reporting" / name;
  std::filesystem::remove_all(dir);
  return dir;
}

struct Solved {
  Instance in;
  Plan plan;
};

// First feasible two-technology tiny instance at or after `seed`.
Solved solved_tiny(std::uint64_t seed) {
  for (;; ++seed) {
    auto in = fixtures::tiny_instance(seed, 3, 2, 2);
    if (in.technologies.size() < 2) continue;
    const auto pm = build(in, Variant::SPT);
    const auto res = solve_milp(pm.milp, {});
    if (res.incumbent) return {in, decode(pm, *res.incumbent)};
  }
}

}  // namespace

TEST(Numbers, TwelveSignificantDigits) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(104000.0), "104000");
  EXPECT_THROW(format_number(std::nan("")), Error);
}

TEST(Csv, QuotingRoundTrip) {
  Table t({"a", "b"});
  t.row({"plain", "with,comma"});
  t.row({"say \"hi\"", ""});
  const auto rows = parse_csv(t.csv());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][1], "with,comma");
  EXPECT_EQ(rows[2][0], "say \"hi\"");
  EXPECT_EQ(rows[2][1], "");
  EXPECT_THROW(t.row({"one"}), Error);
}

TEST(Reports, EmptySweepIsHeaderOnly) {
  const auto dir = fresh_dir("empty");
  ReportBundle b;
  b.tables.emplace_back("sweep.csv", sweep_table({}));
  b.tables.emplace_back("tau.csv", tau_table({}));
  write_reports(b, dir);
  const auto text = read_text_file(dir / "sweep.csv");
  EXPECT_EQ(text, "ep_ratio,ci_ratio,scenarios,solved,P_R_eq_0,P_R_ge_0.5,P_R_ge_0.75,P_R_ge_1,E_R\n");
  EXPECT_EQ(parse_csv(read_text_file(dir / "tau.csv")).size(), 1u);
  EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
}

TEST(Reports, LevelsRoundTripAndSumToOne) {
  for (std::uint64_t seed : {4u, 11u, 17u}) {
    const auto s = solved_tiny(seed);
    const auto rep = evaluate(s.plan, s.in, {0.5});
    const auto rows = parse_csv(levels_table(rep, s.in).csv());
    ASSERT_EQ(rows.size(), static_cast<std::size_t>(rep.periods) + 1);
    for (int t = 0; t < rep.periods; ++t) {
      const auto& row = rows[static_cast<std::size_t>(t) + 1];
      double sum = 0.0;
      for (std::size_t j = 0; j < rep.levels.size(); ++j) {
        const double v = std::stod(row[j + 1]);
        EXPECT_NEAR(v, rep.levels[j][static_cast<std::size_t>(t)], 1e-12);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-11);
    }
  }
}

TEST(Reports, ByteIdenticalReruns) {
  const auto s = solved_tiny(5);
  auto bundle = [&] {
    ReportBundle b;
    b.seed = 5;
    b.config = {{"gap", 1e-4}};
    b.tables.emplace_back("plan.csv", plan_table(s.plan, s.in));
    b.tables.emplace_back("production.csv", production_table(s.plan, s.in));
    b.tables.emplace_back("costs.csv", cost_table(s.plan));
    return b;
  };
  const auto a = fresh_dir("a"), c = fresh_dir("c");
  const auto files = write_reports(bundle(), a);
  write_reports(bundle(), c);
  ASSERT_EQ(files.size(), 4u);
  for (const auto& f : files) EXPECT_EQ(read_text_file(f), read_text_file(c / f.filename())) << f;
  const auto manifest = parse_json_text(read_text_file(a / "manifest.json"), "manifest");
  EXPECT_EQ(manifest["files"].size(), 3u);
  EXPECT_EQ(manifest["seed"], 5);
  EXPECT_EQ(manifest["config_hash"].get<std::string>().size(), 16u);
}

TEST(Reports, PlanTableShape) {
  const auto s = solved_tiny(6);
  const auto t = plan_table(s.plan, s.in);
  EXPECT_EQ(t.rows().size(), s.in.machine_count() * static_cast<std::size_t>(s.plan.periods()));
  const auto costs = parse_csv(cost_table(s.plan).csv());
  EXPECT_EQ(costs.back()[0], "total");
  EXPECT_NEAR(std::stod(costs.back()[1]), s.plan.objective, 1e-9 * std::max(1.0, std::abs(s.plan.objective)));
}

TEST(Fnv, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
}
