#pragma once

// Seeded random instances small enough for the enumeration oracle:
// at most 3 periods, 2 machines, 2 items, one shift and no maintenance.

#include <cstdint>
#include <random>

#include "captrans/instance.hpp"

namespace captrans::fixtures {

inline Instance tiny_instance(std::uint64_t seed, int max_periods = 3, int max_machines = 2, int max_items = 2) {
  std::mt19937_64 rng(seed);
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };

  Instance in;
  const int T = pick(1, max_periods);
  const int K = pick(1, max_machines);
  const int I = pick(1, max_items);
  in.horizon = Horizon{T, T, 100.0, 0};
  in.options.maintenance = false;
  in.options.single_shift = true;

  for (int k = 0; k < K; ++k) {
    Machine m;
    m.id = "m" + std::to_string(k + 1);
    m.technology = static_cast<std::size_t>(k % 2);
    m.useful_life = uni(60.0, 250.0);
    m.max_utilization = uni(0.6, 1.0);
    m.fixed_time_maintenance = 50.0;
    m.maintenance_durations = {1.0};
    m.workers = pick(1, 3);
    // Roughly one machine in four already runs at the start of the horizon.
    if (pick(0, 3) == 0) {
      m.pool = MachinePool::Existing;
      m.initial_state = 1;
      m.remaining_life_at_start = uni(20.0, m.useful_life);
    }
    in.machines.push_back(m);
  }
  in.technologies = {Technology{"dirty", {}}};
  if (K > 1) in.technologies.push_back(Technology{"clean", {}});
  for (int k = 0; k < K; ++k) in.technologies[in.machines[static_cast<std::size_t>(k)].technology].machines.push_back(static_cast<std::size_t>(k));
  for (const auto& m : in.machines)
    if (m.pool == MachinePool::Existing) in.horizon.initial_shifts = 1;

  for (int i = 0; i < I; ++i) {
    Item it;
    it.id = "i" + std::to_string(i + 1);
    for (int k = 0; k < K; ++k) {
      it.rate.push_back(uni(20.0, 60.0));
      it.emission.push_back(uni(0.1, 1.0) * (k % 2 == 1 ? 0.5 : 1.0));
    }
    for (int t = 0; t < T; ++t) it.demand.push_back(std::round(uni(0.0, 1500.0)));
    it.initial_inventory = pick(0, 1) ? std::round(uni(0.0, 300.0)) : 0.0;
    it.holding_emission = uni(0.0, 0.05);
    in.items.push_back(it);
  }

  auto& c = in.costs;
  c.discount_rate = 0.1;
  for (int k = 0; k < K; ++k) {
    c.investment.push_back(uni(500.0, 3000.0));
    c.salvage.push_back(0.8 * c.investment.back() / in.machines[static_cast<std::size_t>(k)].useful_life);
    c.maintenance.push_back(10.0);
    c.labor.push_back(uni(50.0, 300.0));
    c.hiring.push_back(uni(10.0, 100.0));
    c.firing.push_back(uni(10.0, 100.0));
  }
  for (int i = 0; i < I; ++i) {
    c.production.emplace_back();
    for (int k = 0; k < K; ++k) c.production.back().push_back(uni(0.05, 0.5));
    c.holding.push_back(uni(0.05, 0.6));
  }
  c.shift_opening.assign(kStateCount, uni(50.0, 200.0));
  c.shift_closing.assign(kStateCount, uni(50.0, 200.0));
  c.carbon_tax = linear_tax_ramp(uni(1.0, 5.0), uni(5.0, 10.0), T, T);
  return in;
}

}  // namespace captrans::fixtures
