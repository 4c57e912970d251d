#pragma once

// Seeded scenario sweeps over demand scale and clean/dirty emission and
// investment ratios, with per-cell transition statistics.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "captrans/effectiveness.hpp"
#include "captrans/instance.hpp"
#include "captrans/model.hpp"
#include "captrans/solver.hpp"

namespace captrans {

/// Maps a draw u from U(0.05, 25) to the demand scale factor.
inline double xi_from_draw(double u) { return 0.05 + (u - 0.05) / 10.0; }

/// Draws xi. The uniform variate is built from the raw 64-bit output so the
/// sequence is identical on every standard library.
inline double sample_xi(std::mt19937_64& rng) {
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return xi_from_draw(0.05 + (25.0 - 0.05) * unit);
}

/// Sets the clean technology (index 1) to ep_ratio times the dirty emissions and
/// ci_ratio times the dirty investment; salvage rates follow the investment.
/// Reference values come from the first machine of technology 0.
inline Instance apply_technology_ratios(const Instance& in, double ep_ratio, double ci_ratio) {
  if (!(ep_ratio > 0.0 && ep_ratio < 1.0)) throw ValidationError({"emission ratio must lie in (0,1)"});
  if (!(ci_ratio > 1.0) || !std::isfinite(ci_ratio)) throw ValidationError({"investment ratio must exceed 1"});
  if (in.technologies.size() != 2 || in.technologies[0].machines.empty())
    throw ValidationError({"technology ratios need exactly two technologies with machines"});
  Instance out = in;
  const std::size_t ref = in.technologies[0].machines.front();
  for (auto k : in.technologies[1].machines) {
    for (auto& it : out.items) it.emission[k] = ep_ratio * it.emission[ref];
    out.costs.investment[k] = ci_ratio * in.costs.investment[ref];
    out.costs.salvage[k] = ci_ratio * in.costs.salvage[ref];
  }
  validate(out);
  return out;
}

/// Multiplies every demand and initial inventory by xi without aggregating items.
inline Instance scale_demand(const Instance& in, double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw ValidationError({"demand scale must be positive"});
  Instance out = in;
  for (auto& it : out.items) {
    for (auto& d : it.demand) d *= xi;
    it.initial_inventory *= xi;
  }
  return out;
}

struct SweepSpec {
  Instance base;
  int instances = 50;
  std::vector<double> ep_ratios{0.5, 0.7};
  std::vector<double> ci_ratios{1.3, 1.4, 1.5, 1.6};
  std::vector<double> betas{0.5, 0.75};
  std::uint64_t seed = 1;
  SolverConfig solver{1e-3, 60.0};
  /// Aggregate items, drop maintenance and pin one shift; false keeps the full model.
  bool simplified = true;
  int jobs = 1;
  /// Keep decoded plans and scenario instances in the result.
  bool keep_plans = false;
};

struct Scenario {
  int instance = 0;
  double xi = 0.0;
  double ep_ratio = 0.0;
  double ci_ratio = 0.0;
};

struct ScenarioResult {
  Scenario scenario;
  std::optional<MilpStatus> status;       // empty when the scenario failed before solving
  std::string error;
  double objective = 0.0;
  double gap = 0.0;
  long nodes = 0;
  double seconds = 0.0;
  double clean_level = 0.0;               // weighted level in the last reported period
  std::vector<std::optional<int>> tau;    // per beta
  std::optional<Plan> plan;
  std::optional<Instance> instance;

  bool solved() const { return status && has_solution_status(*status); }
};

struct SweepResult {
  std::vector<double> betas;
  std::vector<ScenarioResult> scenarios;
};

/// Scenario list in instance-major order; xi is drawn once per instance.
inline std::vector<Scenario> sweep_scenarios(const SweepSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<Scenario> out;
  for (int n = 0; n < spec.instances; ++n) {
    const double xi = sample_xi(rng);
    for (double ep : spec.ep_ratios)
      for (double ci : spec.ci_ratios) out.push_back({n, xi, ep, ci});
  }
  return out;
}

/// The concrete instance solved for one scenario.
inline Instance scenario_instance(const SweepSpec& spec, const Scenario& s) {
  Instance in = spec.simplified ? aggregate_to_single_product(spec.base, s.xi) : scale_demand(spec.base, s.xi);
  in = apply_technology_ratios(in, s.ep_ratio, s.ci_ratio);
  return with_candidate_count(in, default_candidate_count(in));
}

inline ScenarioResult run_scenario(const SweepSpec& spec, const Scenario& s) {
  ScenarioResult r;
  r.scenario = s;
  try {
    const Instance in = scenario_instance(spec, s);
    const auto pm = build(in, Variant::SPT);
    const auto res = solve_milp(pm.milp, spec.solver);
    r.status = res.status;
    r.nodes = res.nodes;
    r.seconds = res.seconds;
    r.gap = res.gap;
    if (res.incumbent && has_solution_status(res.status)) {
      r.objective = res.objective;
      Plan plan = decode(pm, *res.incumbent);
      const auto rep = evaluate(plan, in, spec.betas);
      r.clean_level = rep.final_level;
      r.tau = rep.tau;
      if (spec.keep_plans) {
        r.plan = std::move(plan);
        r.instance = in;
      }
    }
  } catch (const std::exception& e) {
    r.status.reset();
    r.error = e.what();
  }
  return r;
}

/// Solves every scenario; results are in scenario order whatever the worker count.
inline SweepResult run_sweep(const SweepSpec& spec) {
  SweepResult out;
  out.betas = spec.betas;
  const auto list = sweep_scenarios(spec);
  out.scenarios.resize(list.size());
  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(list.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < list.size(); i = next++) out.scenarios[i] = run_scenario(spec, list[i]);
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return out;
}

struct TauSummary {
  double beta = 0.0;
  int finite = 0;
  std::optional<double> q1, median, q3;
};

struct CellSummary {
  double ep_ratio = 0.0;
  double ci_ratio = 0.0;
  int total = 0;
  int solved = 0;
  double p_zero = 0.0;
  double p_half = 0.0;
  double p_three_quarters = 0.0;
  double p_one = 0.0;
  double expectation = 0.0;
  std::vector<TauSummary> tau;
};

/// Quantile with linear interpolation between order statistics.
inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw Error("quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

/// Per-cell statistics over solved scenarios, cells in first-appearance order.
inline std::vector<CellSummary> summarize(const SweepResult& res) {
  constexpr double eps = 1e-9;
  std::vector<CellSummary> cells;
  auto cell_of = [&](const Scenario& s) -> CellSummary& {
    for (auto& c : cells)
      if (c.ep_ratio == s.ep_ratio && c.ci_ratio == s.ci_ratio) return c;
    CellSummary c;
    c.ep_ratio = s.ep_ratio;
    c.ci_ratio = s.ci_ratio;
    cells.push_back(std::move(c));
    return cells.back();
  };
  std::vector<std::vector<std::vector<double>>> taus;
  for (const auto& r : res.scenarios) cell_of(r.scenario);
  taus.assign(cells.size(), std::vector<std::vector<double>>(res.betas.size()));
  for (const auto& r : res.scenarios) {
    auto& c = cell_of(r.scenario);
    const auto ci = static_cast<std::size_t>(&c - cells.data());
    ++c.total;
    if (!r.solved()) continue;
    ++c.solved;
    const double R = r.clean_level;
    c.p_zero += R <= eps;
    c.p_half += R >= 0.5 - eps;
    c.p_three_quarters += R >= 0.75 - eps;
    c.p_one += R >= 1.0 - eps;
    c.expectation += R;
    for (std::size_t b = 0; b < res.betas.size() && b < r.tau.size(); ++b)
      if (r.tau[b]) taus[ci][b].push_back(*r.tau[b]);
  }
  for (std::size_t ci = 0; ci < cells.size(); ++ci) {
    auto& c = cells[ci];
    if (c.solved > 0) {
      const double n = c.solved;
      c.p_zero /= n;
      c.p_half /= n;
      c.p_three_quarters /= n;
      c.p_one /= n;
      c.expectation /= n;
    }
    for (std::size_t b = 0; b < res.betas.size(); ++b) {
      TauSummary t;
      t.beta = res.betas[b];
      t.finite = static_cast<int>(taus[ci][b].size());
      if (!taus[ci][b].empty()) {
        t.q1 = quantile(taus[ci][b], 0.25);
        t.median = quantile(taus[ci][b], 0.5);
        t.q3 = quantile(taus[ci][b], 0.75);
      }
      c.tau.push_back(t);
    }
  }
  return cells;
}

}  // namespace captrans
