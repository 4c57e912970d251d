#include <gtest/gtest.h>

#include <set>

#include "captrans/model.hpp"
#include "tiny.hpp"

using namespace captrans;

namespace {

Instance one_machine(bool maintenance, bool single_shift) {
  Instance in = fixtures::tiny_instance(3, 1, 1, 1);
  in.options.maintenance = maintenance;
  in.options.single_shift = single_shift;
  return in;
}

// Every machine idles (e0) and the system stays at zero shifts.
std::vector<double> idle_vector(const PlanningModel& pm) {
  std::vector<double> x(pm.milp.num_vars(), 0.0);
  for (const auto& per_t : pm.x)
    for (const auto& xs : per_t) x[static_cast<std::size_t>(xs[0])] = 1.0;
  for (const auto& zs : pm.z) x[static_cast<std::size_t>(zs[0])] = 1.0;
  return x;
}

Instance zero_demand_example() {
  ExampleOptions o;
  o.periods = 3;
  o.simulated_periods = 3;
  o.candidates_per_technology = 1;
  Instance in = builtin_example(o);
  for (auto& it : in.items) std::fill(it.demand.begin(), it.demand.end(), 0.0);
  return in;
}

}  // namespace

TEST(Build, AppendixBinaryCount) {
  const Instance in = builtin_example();
  const auto pm = build(in, Variant::SPT);
  const std::size_t K = in.machine_count();
  const std::size_t T = static_cast<std::size_t>(in.periods());
  const std::size_t W = static_cast<std::size_t>(maintenance_count_bound(in.machines[0]));
  EXPECT_EQ(W, 4u);
  EXPECT_EQ(pm.milp.binary_count(), K * 16 * T + 4 * T + 2 * 4 * T + W * K * T);
}

TEST(Build, BinariesAreZeroOneAndDirectoryIsBijective) {
  const auto pm = build(builtin_example(), Variant::SPT);
  ASSERT_EQ(pm.directory.size(), pm.milp.num_vars());
  std::set<std::string> names;
  for (std::size_t j = 0; j < pm.milp.num_vars(); ++j) {
    const auto& v = pm.milp.var(static_cast<int>(j));
    EXPECT_EQ(v.name, symbol_name(pm.directory[j]));
    names.insert(v.name);
    if (v.kind == VarKind::Binary) {
      EXPECT_GE(v.lower, 0.0);
      EXPECT_LE(v.upper, 1.0);
    }
  }
  EXPECT_EQ(names.size(), pm.milp.num_vars());
  EXPECT_EQ(pm.milp.var(pm.x[0][2][6]).name, "X_k1_e6_t3");
}

TEST(Build, SpwtHasNoTaxOnQuantities) {
  const Instance in = one_machine(false, true);
  const auto spt = build(in, Variant::SPT);
  const auto spwt = build(in, Variant::SPWT);
  const double q = spwt.quantity_scale;
  for (int t = 1; t <= in.periods(); ++t) {
    const auto ut = static_cast<std::size_t>(t - 1);
    EXPECT_NEAR(spwt.milp.var(spwt.y[0][0][ut]).cost, in.CP(0, 0, t) * q, 1e-9);
    EXPECT_NEAR(spwt.milp.var(spwt.inv[0][ut]).cost, in.CH(0, t) * q, 1e-9);
    EXPECT_NEAR(spt.milp.var(spt.y[0][0][ut]).cost - spwt.milp.var(spwt.y[0][0][ut]).cost,
                in.CT(t) * in.items[0].emission[0] * q, 1e-9);
  }
  // All other columns cost the same.
  for (std::size_t j = 0; j < spt.milp.num_vars(); ++j) {
    const auto kind = spt.directory[j].kind;
    if (kind != Symbol::Kind::Y && kind != Symbol::Kind::I)
      EXPECT_EQ(spt.milp.var(static_cast<int>(j)).cost, spwt.milp.var(static_cast<int>(j)).cost);
  }
}

TEST(Build, EachTransitionInOnePartitionRow) {
  const Instance in = builtin_example(ExampleOptions{4, 4, 2});
  const auto pm = build(in, Variant::SPT);
  std::vector<int> hits(pm.milp.num_vars(), 0);
  for (const auto& r : pm.milp.rows())
    if (static_cast<RowFamily>(r.family) == RowFamily::OneTransition)
      for (const auto& c : r.coefs) ++hits[static_cast<std::size_t>(c.col)];
  for (std::size_t k = 0; k < in.machine_count(); ++k)
    for (int t = 1; t <= in.periods(); ++t)
      for (int e = 0; e < kTransitionCount; ++e)
        EXPECT_EQ(hits[static_cast<std::size_t>(pm.x[k][static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(e)])],
                  t >= 2 ? 1 : 0);
}

TEST(Build, NoMaintenanceDropsColumnsAndRows) {
  const auto pm = build(one_machine(false, true), Variant::SPT);
  for (const auto& s : pm.directory) {
    EXPECT_NE(s.kind, Symbol::Kind::M);
    EXPECT_NE(s.kind, Symbol::Kind::TM);
  }
  for (const auto& r : pm.milp.rows()) {
    const auto f = static_cast<RowFamily>(r.family);
    EXPECT_NE(f, RowFamily::MaintenanceClock);
    EXPECT_NE(f, RowFamily::MaintenanceOnce);
  }
}

TEST(Decode, IdlePlanHasZeroCost) {
  const auto pm = build(zero_demand_example(), Variant::SPT);
  const Plan p = decode(pm, idle_vector(pm));
  EXPECT_DOUBLE_EQ(p.objective, 0.0);
  EXPECT_DOUBLE_EQ(p.costs.total(), 0.0);
  for (int s : p.shifts) EXPECT_EQ(s, 0);
  EXPECT_TRUE(plan_violations(p, pm.instance).empty());
}

TEST(Decode, ClockAboveIntervalNamesTheCapRow) {
  const auto pm = build(zero_demand_example(), Variant::SPT);
  auto x = idle_vector(pm);
  x[static_cast<std::size_t>(pm.clock[0][2])] = pm.instance.machines[0].fixed_time_maintenance + 1.0;
  try {
    decode(pm, x);
    FAIL() << "expected rejection";
  } catch (const InfeasibleVectorError& e) {
    EXPECT_EQ(e.family(), RowFamily::MaintenanceClockCap);
    EXPECT_EQ(e.row(), "clock_cap[1,3]");
    EXPECT_NEAR(e.amount(), 1.0, 1e-9);
  }
}

TEST(Decode, RejectsFractionalBinary) {
  const auto pm = build(zero_demand_example(), Variant::SPT);
  auto x = idle_vector(pm);
  x[static_cast<std::size_t>(pm.x[0][0][0])] = 0.5;
  x[static_cast<std::size_t>(pm.x[0][0][1])] = 0.5;
  EXPECT_THROW(decode(pm, x), IntegralityError);
}

TEST(Decode, RejectsWrongLength) {
  const auto pm = build(zero_demand_example(), Variant::SPT);
  EXPECT_THROW(decode(pm, std::vector<double>(3, 0.0)), SolverError);
}

TEST(Decode, UnmetDemandIsRejected) {
  ExampleOptions o{3, 3, 1};
  const auto pm = build(builtin_example(o), Variant::SPT);
  try {
    decode(pm, idle_vector(pm));
    FAIL() << "expected rejection";
  } catch (const InfeasibleVectorError& e) {
    EXPECT_EQ(e.family(), RowFamily::Demand);
  }
}
