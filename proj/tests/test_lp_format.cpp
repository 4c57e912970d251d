#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include "captrans/lp_format.hpp"
#include "captrans/solver.hpp"
#include "tiny.hpp"

using namespace captrans;

TEST(LpText, SingleBinaryColumn) {
  MilpModel m;
  m.add_variable({"x", 0.0, 1.0, VarKind::Binary, 2.5});
  const auto text = lp_text(m);
  EXPECT_NE(text.find("Minimize\n obj: 2.5 x\n"), std::string::npos);
  EXPECT_NE(text.find("Bounds\n 0 <= x <= 1\n"), std::string::npos);
  EXPECT_NE(text.find("Binary\n x\n"), std::string::npos);
  EXPECT_NE(text.find("End\n"), std::string::npos);
}

TEST(LpText, NameCollisionIsRejected) {
  MilpModel m;
  m.add_variable({"x", 0.0, 1.0, VarKind::Binary, 0.0});
  m.add_variable({"x", 0.0, 1.0, VarKind::Binary, 0.0});
  EXPECT_THROW(lp_text(m), ExportError);

  MilpModel r;
  const int x = r.add_variable({"x", 0.0, 1.0, VarKind::Continuous, 0.0});
  r.add_row("cap[1,2]", 0, {{x, 1.0}}, -kInf, 1.0);
  r.add_row("cap_1_2", 0, {{x, 1.0}}, -kInf, 1.0);   // same name once sanitized
  EXPECT_THROW(lp_text(r), ExportError);
}

TEST(LpText, RoundTripOfPlanningModel) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto pm = build(fixtures::tiny_instance(seed), Variant::SPT);
    std::string why;
    EXPECT_TRUE(same_model(pm.milp, parse_lp_text(lp_text(pm.milp)), &why)) << why;
  }
  const auto app = build(builtin_example(), Variant::SPT);
  std::string why;
  EXPECT_TRUE(same_model(app.milp, parse_lp_text(lp_text(app.milp)), &why)) << why;
}

TEST(LpText, RangedRowsFreeColumnsAndOffset) {
  MilpModel m;
  const int a = m.add_variable({"a", -kInf, kInf, VarKind::Continuous, -1.0});
  const int b = m.add_variable({"b", -kInf, 4.0, VarKind::Continuous, 0.0});
  m.add_row("band", 0, {{a, 1.0}, {b, -2.0}}, -1.0, 3.0);
  m.add_row("eq", 0, {{a, 1.0}, {b, 1.0}}, 2.0, 2.0);
  m.set_objective_offset(-7.25);
  const auto text = lp_text(m);
  EXPECT_NE(text.find(" a free\n"), std::string::npos);
  EXPECT_NE(text.find(" -inf <= b <= 4\n"), std::string::npos);
  EXPECT_NE(text.find("band_lo:"), std::string::npos);
  EXPECT_NE(text.find("band_hi:"), std::string::npos);
  std::string why;
  EXPECT_TRUE(same_model(m, parse_lp_text(text), &why)) << why;
}

TEST(LpText, MalformedTextIsParseError) {
  EXPECT_THROW(parse_lp_text("Subject To\n c: x >= 1\nEnd\n"), ParseError);
  EXPECT_THROW(parse_lp_text("Minimize\n obj: x\nSubject To\n c: x >= \nEnd\n"), ParseError);
  EXPECT_THROW(parse_lp_text("Minimize\n obj: x\nSubject To\nBounds\n x ~ 3\nEnd\n"), ParseError);
}

TEST(SolutionFile, ImportMatchesInternalSolve) {
  const auto pm = build(fixtures::tiny_instance(3), Variant::SPT);
  const auto res = solve_milp(pm.milp, {});
  ASSERT_TRUE(res.incumbent);
  const auto x = parse_solution_text(solution_text(pm.milp, *res.incumbent), pm.milp);
  EXPECT_EQ(x, *res.incumbent);
  const auto path = std::filesystem::temp_directory_path() / "captrans_tiny.sol";
  write_text_file(path, "# produced elsewhere\n\n" + solution_text(pm.milp, *res.incumbent));
  const auto plan = import_external_solution(path, pm);
  EXPECT_NEAR(plan.objective, res.objective, 1e-6 * std::max(1.0, std::abs(res.objective)));
}

TEST(SolutionFile, Errors) {
  const auto pm = build(fixtures::tiny_instance(3), Variant::SPT);
  const auto res = solve_milp(pm.milp, {});
  ASSERT_TRUE(res.incumbent);
  const auto full = solution_text(pm.milp, *res.incumbent);

  const auto truncated = full.substr(0, full.rfind('\n', full.size() - 2) + 1);
  EXPECT_THROW(parse_solution_text(truncated, pm.milp), ParseError);
  EXPECT_THROW(parse_solution_text(full + "ghost 1\n", pm.milp), ParseError);
  EXPECT_THROW(parse_solution_text(full + pm.milp.var(0).name + " 1\n", pm.milp), ParseError);
  EXPECT_THROW(parse_solution_text("x\n", pm.milp), ParseError);
  EXPECT_THROW(parse_solution_text(pm.milp.var(0).name + " abc\n", pm.milp), ParseError);

  // A fractional binary parses but fails decoding.
  auto x = *res.incumbent;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (pm.milp.var(static_cast<int>(j)).kind == VarKind::Binary) {
      x[j] = 0.5;
      break;
    }
  const auto parsed = parse_solution_text(solution_text(pm.milp, x), pm.milp);
  EXPECT_THROW(decode(pm, parsed), IntegralityError);
}

TEST(LpFile, ExportWritesCheckedText) {
  const auto pm = build(fixtures::tiny_instance(9), Variant::SPWT);
  const auto path = std::filesystem::temp_directory_path() / "captrans_tiny.lp";
  export_lp_file(pm.milp, path);
  EXPECT_EQ(read_text_file(path), lp_text(pm.milp));
}
