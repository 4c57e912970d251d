#pragma once

// Planning-problem parameters: machines, items, technologies, horizon and the
// discounted cost schedule, plus validation and the built-in juice-line example.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "captrans/errors.hpp"
#include "captrans/statespace.hpp"

namespace captrans {

enum class MachinePool { Existing, Candidate };

struct Machine {
  std::string id;
  std::size_t technology = 0;
  MachinePool pool = MachinePool::Candidate;
  int initial_state = 0;                       // s0, only meaningful for existing machines
  double useful_life = 0.0;                    // v_k, hours
  double max_utilization = 1.0;                // mu_k
  double fixed_time_maintenance = 0.0;         // FTM_k, hours between maintenances
  std::vector<double> maintenance_durations;   // RMT_wk, hours; one entry broadcasts
  double workers = 0.0;                        // O_k
  double remaining_life_at_start = 0.0;        // RL_k^0, hours

  /// Duration of the w-th maintenance (0-based), broadcasting the last entry.
  double maintenance_duration(std::size_t w) const {
    if (maintenance_durations.empty()) return 0.0;
    return maintenance_durations[std::min(w, maintenance_durations.size() - 1)];
  }
};

struct Item {
  std::string id;
  std::vector<double> demand;          // d_it, indexed by period (0-based)
  double initial_inventory = 0.0;      // I_i^0
  std::vector<double> rate;            // r_ik, units/hour per machine; 0 = cannot produce
  std::vector<double> emission;        // ep_ik, CO2 ton/unit per machine
  double holding_emission = 0.0;       // eh_i, CO2 ton/unit-period
};

struct Technology {
  std::string id;
  std::vector<std::size_t> machines;   // N_j
};

struct Horizon {
  int periods = 1;              // reported decision horizon |T|
  int simulated_periods = 1;    // periods actually modelled (tail discarded in reports)
  double shift_length = 0.0;    // l, hours
  int initial_shifts = 0;       // system-level s0 used for Z^0
};

/// Base-period (t = 1) costs; every cost at period t is base * (1 + rate)^(1 - t).
/// The carbon tax is given as an explicit nominal trajectory and discounted the same way.
struct CostSchedule {
  double discount_rate = 0.0;
  std::vector<double> investment;                 // CI_k^1
  std::vector<std::vector<double>> production;    // CP_ik^1 [item][machine]
  std::vector<double> maintenance;                // CM_k^1 (same for every w)
  std::vector<double> labor;                      // CL_k^1 per worker-shift
  std::vector<double> hiring;                     // CA_k^1 per worker
  std::vector<double> firing;                     // CF_k^1 per worker
  std::vector<double> shift_opening;              // CO_s^1, s = 0..3
  std::vector<double> shift_closing;              // CC_s^1, s = 0..3
  std::vector<double> holding;                    // CH_i^1
  std::vector<double> carbon_tax;                 // CT_t nominal, per simulated period
  std::vector<double> salvage;                    // alpha_k^1, money per remaining-life hour

  /// (1 + rate)^(1 - t) for 1-based period t.
  double factor(int t) const { return std::pow(1.0 + discount_rate, 1 - t); }
};

struct ModelOptions {
  bool maintenance = true;
  bool single_shift = false;     // pin one work shift in every period
  bool increasing_tax = true;    // carbon_tax must be non-decreasing
};

struct Instance {
  std::vector<Machine> machines;
  std::vector<Item> items;
  std::vector<Technology> technologies;
  Horizon horizon;
  CostSchedule costs;
  ModelOptions options;

  std::size_t machine_count() const { return machines.size(); }
  std::size_t item_count() const { return items.size(); }
  int periods() const { return horizon.simulated_periods; }

  // Discounted cost accessors, t is 1-based.
  double CI(std::size_t k, int t) const { return costs.investment[k] * costs.factor(t); }
  double CP(std::size_t i, std::size_t k, int t) const { return costs.production[i][k] * costs.factor(t); }
  double CM(std::size_t k, int t) const { return costs.maintenance[k] * costs.factor(t); }
  double CL(std::size_t k, int t) const { return costs.labor[k] * costs.factor(t); }
  double CA(std::size_t k, int t) const { return costs.hiring[k] * costs.factor(t); }
  double CF(std::size_t k, int t) const { return costs.firing[k] * costs.factor(t); }
  double CO(int s, int t) const { return costs.shift_opening[static_cast<std::size_t>(s)] * costs.factor(t); }
  double CC(int s, int t) const { return costs.shift_closing[static_cast<std::size_t>(s)] * costs.factor(t); }
  double CH(std::size_t i, int t) const { return costs.holding[i] * costs.factor(t); }
  double CT(int t) const { return costs.carbon_tax[static_cast<std::size_t>(t - 1)] * costs.factor(t); }
  double alpha(std::size_t k, int t) const { return costs.salvage[k] * costs.factor(t); }
  double demand(std::size_t i, int t) const { return items[i].demand[static_cast<std::size_t>(t - 1)]; }
};

/// |W| = ceil(v_k / FTM_k): more maintenances than this would outlast the useful life.
inline int maintenance_count_bound(const Machine& m) {
  if (!(m.fixed_time_maintenance > 0.0)) throw ValidationError({"machine " + m.id + ": FTM must be positive"});
  return static_cast<int>(std::ceil(m.useful_life / m.fixed_time_maintenance - 1e-12));
}

/// Collects every violated invariant; empty means valid.
inline std::vector<std::string> validation_errors(const Instance& in) {
  std::vector<std::string> err;
  auto add = [&err](std::string s) { err.push_back(std::move(s)); };
  const auto K = in.machines.size();
  const auto I = in.items.size();
  const int T = in.horizon.simulated_periods;

  if (in.horizon.periods < 1) add("horizon: periods must be >= 1");
  if (T < in.horizon.periods) add("horizon: simulated_periods must be >= periods");
  if (!(in.horizon.shift_length > 0.0)) add("horizon: shift length l must be positive");
  if (in.horizon.initial_shifts < 0 || in.horizon.initial_shifts >= kStateCount)
    add("horizon: initial shift count s0 must be in 0..3");
  if (K == 0) add("at least one machine is required");
  if (I == 0) add("at least one item is required");

  for (std::size_t k = 0; k < K; ++k) {
    const auto& m = in.machines[k];
    const std::string tag = "machine " + m.id + ": ";
    if (m.technology >= in.technologies.size()) add(tag + "unknown technology");
    if (!(m.max_utilization > 0.0 && m.max_utilization <= 1.0)) add(tag + "mu must be in (0,1]");
    if (!(m.useful_life > 0.0)) add(tag + "useful life v must be positive");
    if (!(m.fixed_time_maintenance > 0.0 && m.fixed_time_maintenance <= m.useful_life))
      add(tag + "FTM must satisfy 0 < FTM <= v");
    if (m.workers < 0.0) add(tag + "O must be non-negative");
    if (m.remaining_life_at_start < 0.0) add(tag + "RL0 must be non-negative");
    for (double d : m.maintenance_durations)
      if (d < 0.0) add(tag + "RMT entries must be non-negative");
    if (m.pool == MachinePool::Candidate) {
      if (m.remaining_life_at_start != 0.0) add(tag + "candidate machines must start with RL0 = 0");
      if (m.initial_state != 0) add(tag + "candidate machines must start in state 0");
    } else {
      if (m.initial_state < 1 || m.initial_state >= kStateCount)
        add(tag + "existing machines must start in a state 1..3");
      else if (m.initial_state != in.horizon.initial_shifts)
        add(tag + "existing machine state must equal the system shift count s0");
    }
  }

  std::vector<int> owner(K, 0);
  for (const auto& tech : in.technologies)
    for (auto k : tech.machines) {
      if (k >= K) add("technology " + tech.id + ": unknown machine index");
      else ++owner[k];
    }
  for (std::size_t k = 0; k < K; ++k) {
    if (owner[k] != 1) add("machine " + in.machines[k].id + ": must belong to exactly one technology");
    else if (in.machines[k].technology < in.technologies.size()) {
      const auto& mem = in.technologies[in.machines[k].technology].machines;
      if (std::find(mem.begin(), mem.end(), k) == mem.end())
        add("machine " + in.machines[k].id + ": technology field disagrees with technology membership");
    }
  }

  for (std::size_t i = 0; i < I; ++i) {
    const auto& it = in.items[i];
    const std::string tag = "item " + it.id + ": ";
    if (static_cast<int>(it.demand.size()) != T) add(tag + "demand must have one entry per simulated period");
    if (it.rate.size() != K) add(tag + "r must have one entry per machine");
    if (it.emission.size() != K) add(tag + "ep must have one entry per machine");
    if (it.initial_inventory < 0.0) add(tag + "I0 must be non-negative");
    if (it.holding_emission < 0.0) add(tag + "eh must be non-negative");
    bool any_demand = false;
    for (double d : it.demand) {
      if (d < 0.0) add(tag + "demand must be non-negative");
      if (d > 0.0) any_demand = true;
    }
    bool any_rate = false;
    for (double r : it.rate) {
      if (r < 0.0) add(tag + "r must be non-negative");
      if (r > 0.0) any_rate = true;
    }
    for (double e : it.emission)
      if (e < 0.0) add(tag + "ep must be non-negative");
    if (any_demand && !any_rate) add(tag + "has demand but no machine can produce it");
  }

  const auto& c = in.costs;
  auto check_len = [&](const auto& v, std::size_t n, const char* name) {
    if (v.size() != n) add(std::string("costs: ") + name + " has wrong length");
    for (double x : v)
      if (!std::isfinite(x) || x < 0.0) add(std::string("costs: ") + name + " entries must be finite and >= 0");
  };
  if (c.discount_rate <= -1.0) add("costs: discount rate must be > -1");
  check_len(c.investment, K, "CI");
  check_len(c.maintenance, K, "CM");
  check_len(c.labor, K, "CL");
  check_len(c.hiring, K, "CA");
  check_len(c.firing, K, "CF");
  check_len(c.salvage, K, "alpha");
  check_len(c.shift_opening, kStateCount, "CO");
  check_len(c.shift_closing, kStateCount, "CC");
  check_len(c.holding, I, "CH");
  check_len(c.carbon_tax, static_cast<std::size_t>(std::max(T, 0)), "CT");
  if (c.production.size() != I) add("costs: CP must have one row per item");
  for (const auto& row : c.production) check_len(row, K, "CP row");
  if (in.options.increasing_tax)
    for (std::size_t t = 1; t < c.carbon_tax.size(); ++t)
      if (c.carbon_tax[t] < c.carbon_tax[t - 1]) {
        add("costs: CT must be non-decreasing under an increasing-tax policy");
        break;
      }
  return err;
}

inline void validate(const Instance& in) {
  auto err = validation_errors(in);
  if (!err.empty()) throw ValidationError(std::move(err));
}

/// Production hours needed in the busiest period if every item runs on its fastest machine.
inline double peak_demand_hours(const Instance& in) {
  double peak = 0.0;
  for (int t = 1; t <= in.periods(); ++t) {
    double hours = 0.0;
    for (const auto& it : in.items) {
      double best = 0.0;
      for (double r : it.rate) best = std::max(best, r);
      if (best > 0.0) hours += it.demand[static_cast<std::size_t>(t - 1)] / best;
    }
    peak = std::max(peak, hours);
  }
  return peak;
}

/// Linear tax ramp from `start` to `end` over the decision periods, held at `end` afterwards.
inline std::vector<double> linear_tax_ramp(double start, double end, int decision_periods, int simulated_periods) {
  std::vector<double> ct(static_cast<std::size_t>(simulated_periods), end);
  for (int t = 1; t <= std::min(decision_periods, simulated_periods); ++t) {
    double frac = decision_periods > 1 ? double(t - 1) / double(decision_periods - 1) : 1.0;
    ct[static_cast<std::size_t>(t - 1)] = start + (end - start) * frac;
  }
  return ct;
}

struct ExampleOptions {
  int periods = 8;
  int simulated_periods = 12;
  /// Candidate machines per technology; 0 selects ceil(peak hours / (mu * shifts * l)) + 1.
  int candidates_per_technology = 0;
  /// Clean-technology production emissions as a fraction of the dirty ones.
  double clean_emission_ratio = 0.5;
  bool carbon_tax = true;
  ModelOptions model{};
};

namespace detail {
inline constexpr int kExampleItems = 8;
inline constexpr int kExamplePeriods = 12;
inline constexpr double kExampleDemand[kExampleItems][kExamplePeriods] = {
    {20000, 47726, 63945, 75452, 84378, 91670, 97836, 103178, 107889, 112103, 115916, 119396},
    {28000, 66816, 89522, 105633, 118129, 128339, 136971, 144449, 151045, 156945, 162282, 167155},
    {24000, 57271, 76733, 90542, 101253, 110004, 117404, 123813, 129467, 134524, 139099, 143276},
    {14000, 33408, 44761, 52816, 59064, 64169, 68485, 72224, 75522, 78472, 81141, 83577},
    {22000, 52498, 70339, 82997, 92815, 100837, 107620, 113495, 118678, 123314, 127507, 131336},
    {26000, 62044, 83128, 98087, 109691, 119172, 127187, 134131, 140256, 145734, 150691, 155215},
    {32000, 76361, 102311, 120723, 135004, 146673, 156538, 165084, 172622, 179365, 185465, 191034},
    {34000, 81134, 108706, 128268, 143442, 155840, 166322, 175402, 183411, 190576, 197057, 202974},
};
inline constexpr double kExampleRate[kExampleItems] = {480, 672, 576, 336, 528, 624, 768, 816};
inline constexpr double kExampleHoldingEmission[kExampleItems] = {0.023, 0.032, 0.027, 0.016,
                                                                  0.025, 0.029, 0.036, 0.038};
inline constexpr double kExampleProductionCost[kExampleItems] = {0.075, 0.105, 0.09, 0.053,
                                                                 0.083, 0.098, 0.12, 0.128};
inline constexpr double kExampleHoldingCost[kExampleItems] = {0.66, 0.92, 0.79, 0.46, 0.72, 0.85, 1.05, 1.12};
inline constexpr double kExampleEmission[kExampleItems] = {0.30, 0.21, 0.25, 0.42, 0.27, 0.23, 0.18, 0.17};
inline constexpr double kDirtyInvestment = 65000.0;
inline constexpr double kCleanInvestment = 104000.0;
}  // namespace detail

/// The juice pasteurizing/filling line: eight items, a dirty and a clean technology,
/// tax rising from 35 to 70 per ton over the decision horizon, 10% discounting.
inline Instance builtin_example(const ExampleOptions& opt = {}) {
  using namespace detail;
  if (opt.simulated_periods < 1 || opt.simulated_periods > kExamplePeriods || opt.periods < 1 ||
      opt.periods > opt.simulated_periods)
    throw ValidationError({"example: periods must satisfy 1 <= periods <= simulated_periods <= 12"});

  Instance in;
  in.options = opt.model;
  const int T = opt.simulated_periods;
  in.horizon = Horizon{opt.periods, T, 2080.0, 0};

  const double mu = 0.85, v = 20000.0, ftm = 5000.0;
  int per_tech = opt.candidates_per_technology;
  if (per_tech <= 0) {
    double peak = 0.0;
    for (int t = 0; t < T; ++t) {
      double h = 0.0;
      for (int i = 0; i < kExampleItems; ++i) h += kExampleDemand[i][t] / kExampleRate[i];
      peak = std::max(peak, h);
    }
    const int shifts = opt.model.single_shift ? 1 : kStateCount - 1;
    per_tech = static_cast<int>(std::ceil(peak / (mu * shifts * in.horizon.shift_length))) + 1;
  }

  in.technologies = {Technology{"dirty", {}}, Technology{"clean", {}}};
  for (std::size_t j = 0; j < 2; ++j)
    for (int c = 0; c < per_tech; ++c) {
      Machine m;
      m.id = std::string(j == 0 ? "dirty" : "clean") + std::to_string(c + 1);
      m.technology = j;
      m.pool = MachinePool::Candidate;
      m.useful_life = v;
      m.max_utilization = mu;
      m.fixed_time_maintenance = ftm;
      m.maintenance_durations = {4.0};
      m.workers = 2.0;
      in.technologies[j].machines.push_back(in.machines.size());
      in.machines.push_back(std::move(m));
    }
  const auto K = in.machines.size();

  for (int i = 0; i < kExampleItems; ++i) {
    Item it;
    it.id = "item" + std::to_string(i + 1);
    it.demand.assign(kExampleDemand[i], kExampleDemand[i] + T);
    it.rate.assign(K, kExampleRate[i]);
    for (const auto& m : in.machines)
      it.emission.push_back(kExampleEmission[i] * (m.technology == 1 ? opt.clean_emission_ratio : 1.0));
    it.holding_emission = kExampleHoldingEmission[i];
    in.items.push_back(std::move(it));
  }

  auto& c = in.costs;
  c.discount_rate = 0.10;
  for (const auto& m : in.machines) {
    const double ci = m.technology == 1 ? kCleanInvestment : kDirtyInvestment;
    c.investment.push_back(ci);
    c.salvage.push_back(0.8 * ci / m.useful_life);
    c.maintenance.push_back(600.0);
    c.labor.push_back(4500.0);
    c.hiring.push_back(5000.0);
    c.firing.push_back(5000.0);
  }
  for (int i = 0; i < kExampleItems; ++i) {
    c.production.emplace_back(K, kExampleProductionCost[i]);
    c.holding.push_back(kExampleHoldingCost[i]);
  }
  c.shift_opening.assign(kStateCount, 5000.0);
  c.shift_closing.assign(kStateCount, 5000.0);
  c.carbon_tax = opt.carbon_tax ? linear_tax_ramp(35.0, 70.0, opt.periods, T)
                                : std::vector<double>(static_cast<std::size_t>(T), 0.0);
  validate(in);
  return in;
}

/// Candidate machines per technology so that ceil(peak hours / (mu * shifts * l)) + 1
/// machines can run side by side, using the least capable candidate of each technology.
inline int default_candidate_count(const Instance& in) {
  const int shifts = in.options.single_shift ? 1 : kStateCount - 1;
  double mu = 1.0;
  for (const auto& m : in.machines) mu = std::min(mu, m.max_utilization);
  return static_cast<int>(std::ceil(peak_demand_hours(in) / (mu * shifts * in.horizon.shift_length))) + 1;
}

/// Grows every technology's candidate pool to at least `count` machines by cloning
/// its first candidate (parameters, rates, emissions and costs are copied).
inline Instance with_candidate_count(const Instance& in, int count) {
  Instance out = in;
  for (std::size_t j = 0; j < in.technologies.size(); ++j) {
    std::optional<std::size_t> proto;
    int have = 0;
    for (auto k : in.technologies[j].machines)
      if (in.machines[k].pool == MachinePool::Candidate) {
        if (!proto) proto = k;
        ++have;
      }
    if (!proto) continue;
    const std::size_t src = *proto;
    for (int c = have; c < count; ++c) {
      Machine m = in.machines[src];
      m.id = in.technologies[j].id + std::to_string(c + 1);
      const std::size_t k = out.machines.size();
      out.machines.push_back(m);
      out.technologies[j].machines.push_back(k);
      for (auto& it : out.items) {
        it.rate.push_back(it.rate[src]);
        it.emission.push_back(it.emission[src]);
      }
      auto& c2 = out.costs;
      c2.investment.push_back(c2.investment[src]);
      c2.maintenance.push_back(c2.maintenance[src]);
      c2.labor.push_back(c2.labor[src]);
      c2.hiring.push_back(c2.hiring[src]);
      c2.firing.push_back(c2.firing[src]);
      c2.salvage.push_back(c2.salvage[src]);
      for (auto& row : c2.production) row.push_back(row[src]);
    }
  }
  validate(out);
  return out;
}

/// Collapses all items into one equivalent product with demand xi * sum_i d_it.
/// Rates, costs and emissions are averaged with period-1 demand shares as weights.
/// Maintenance is switched off and the shift count is pinned to one.
inline Instance aggregate_to_single_product(const Instance& in, double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw ValidationError({"aggregation: scale factor xi must be positive"});
  const auto K = in.machine_count();
  const auto I = in.item_count();
  const int T = in.periods();

  std::vector<double> w(I, 0.0);
  double first = 0.0;
  for (std::size_t i = 0; i < I; ++i) first += in.items[i].demand.empty() ? 0.0 : in.items[i].demand[0];
  for (std::size_t i = 0; i < I; ++i)
    w[i] = first > 0.0 ? in.items[i].demand[0] / first : 1.0 / static_cast<double>(I);

  Item agg;
  agg.id = "aggregate";
  agg.demand.assign(static_cast<std::size_t>(T), 0.0);
  agg.rate.assign(K, 0.0);
  agg.emission.assign(K, 0.0);
  std::vector<double> cp(K, 0.0);
  double ch = 0.0;
  for (std::size_t i = 0; i < I; ++i) {
    const auto& it = in.items[i];
    for (int t = 0; t < T; ++t) agg.demand[static_cast<std::size_t>(t)] += it.demand[static_cast<std::size_t>(t)];
    agg.initial_inventory += it.initial_inventory;
    agg.holding_emission += w[i] * it.holding_emission;
    ch += w[i] * in.costs.holding[i];
    for (std::size_t k = 0; k < K; ++k) {
      agg.rate[k] += w[i] * it.rate[k];
      agg.emission[k] += w[i] * it.emission[k];
      cp[k] += w[i] * in.costs.production[i][k];
    }
  }
  for (auto& d : agg.demand) d *= xi;
  agg.initial_inventory *= xi;

  Instance out = in;
  out.items = {std::move(agg)};
  out.costs.production = {std::move(cp)};
  out.costs.holding = {ch};
  out.options.maintenance = false;
  out.options.single_shift = true;
  validate(out);
  return out;
}

}  // namespace captrans
