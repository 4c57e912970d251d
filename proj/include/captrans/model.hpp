#pragma once

// Strategic capacity planning MILP: machine state transitions, work shifts,
// production/inventory, preventive maintenance, useful life and salvage, with
// (SPT) or without (SPWT) the carbon-tax term in the objective.

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "captrans/errors.hpp"
#include "captrans/instance.hpp"
#include "captrans/milp.hpp"
#include "captrans/statespace.hpp"

namespace captrans {

enum class Variant { SPT, SPWT };

inline std::string to_string(Variant v) { return v == Variant::SPT ? "spt" : "spwt"; }

enum class RowFamily : int {
  TransitionContinuity,
  OneTransition,
  BuyOnce,
  InitialExisting,
  InitialCandidate,
  ShiftSelection,
  ShiftLink,
  ShiftOpen,
  ShiftClose,
  Demand,
  MaintenanceClock,
  MaintenanceClockCap,
  MaintenanceOrder,
  MaintenanceOnce,
  MaintenanceOperating,
  Capacity,
  LifeLimit,
  LifeUpdate,
  SalvageDiscard,
  SalvageLife,
};

inline std::string to_string(RowFamily f) {
  switch (f) {
    case RowFamily::TransitionContinuity: return "transition-continuity";
    case RowFamily::OneTransition: return "one-transition";
    case RowFamily::BuyOnce: return "buy-once";
    case RowFamily::InitialExisting: return "initial-existing";
    case RowFamily::InitialCandidate: return "initial-candidate";
    case RowFamily::ShiftSelection: return "shift-selection";
    case RowFamily::ShiftLink: return "shift-link";
    case RowFamily::ShiftOpen: return "shift-open";
    case RowFamily::ShiftClose: return "shift-close";
    case RowFamily::Demand: return "demand";
    case RowFamily::MaintenanceClock: return "maintenance-clock";
    case RowFamily::MaintenanceClockCap: return "maintenance-clock-cap";
    case RowFamily::MaintenanceOrder: return "maintenance-order";
    case RowFamily::MaintenanceOnce: return "maintenance-once";
    case RowFamily::MaintenanceOperating: return "maintenance-operating";
    case RowFamily::Capacity: return "capacity";
    case RowFamily::LifeLimit: return "life-limit";
    case RowFamily::LifeUpdate: return "life-update";
    case RowFamily::SalvageDiscard: return "salvage-discard";
    case RowFamily::SalvageLife: return "salvage-life";
  }
  return "?";
}

/// What a model column stands for, with 1-based subscripts (0 when unused).
struct Symbol {
  enum class Kind { X, Z, O, C, Y, I, M, TM, RL, RF };
  Kind kind;
  int a = 0, b = 0, c = 0;
};

inline std::string symbol_name(const Symbol& s) {
  std::ostringstream o;
  switch (s.kind) {
    case Symbol::Kind::X: o << "X_k" << s.a << "_e" << s.b << "_t" << s.c; break;
    case Symbol::Kind::Z: o << "Z_s" << s.a << "_t" << s.b; break;
    case Symbol::Kind::O: o << "O_s" << s.a << "_t" << s.b; break;
    case Symbol::Kind::C: o << "C_s" << s.a << "_t" << s.b; break;
    case Symbol::Kind::Y: o << "Y_i" << s.a << "_k" << s.b << "_t" << s.c; break;
    case Symbol::Kind::I: o << "I_i" << s.a << "_t" << s.b; break;
    case Symbol::Kind::M: o << "M_w" << s.a << "_k" << s.b << "_t" << s.c; break;
    case Symbol::Kind::TM: o << "TM_k" << s.a << "_t" << s.b; break;
    case Symbol::Kind::RL: o << "RL_k" << s.a << "_t" << s.b; break;
    case Symbol::Kind::RF: o << "RF_k" << s.a << "_t" << s.b; break;
  }
  return o.str();
}

/// The built MILP plus the index layout needed to decode solutions.
struct PlanningModel {
  Instance instance;
  Variant variant = Variant::SPT;
  MilpModel milp;
  std::vector<Symbol> directory;     // one entry per column
  double quantity_scale = 1000.0;    // Y and I are modelled in thousands of units

  // Column indices, -1 when absent. Periods are 0-based here.
  std::vector<std::vector<std::array<int, kTransitionCount>>> x;   // [k][t][e]
  std::vector<std::array<int, kStateCount>> z, open, close;        // [t][s]
  std::vector<std::vector<std::vector<int>>> y;                    // [i][k][t]
  std::vector<std::vector<int>> inv;                               // [i][t]
  std::vector<std::vector<std::vector<int>>> maint;                // [k][w][t]
  std::vector<std::vector<int>> clock, life, salvage;              // [k][t]

  int periods() const { return instance.periods(); }
};

namespace detail {

struct Builder {
  PlanningModel& pm;
  const Instance& in;
  int add(Symbol s, double lb, double ub, VarKind kind, double cost) {
    pm.directory.push_back(s);
    return pm.milp.add_variable(Variable{symbol_name(s), lb, ub, kind, cost});
  }
  void row(RowFamily f, std::string name, std::vector<Coef> coefs, double lo, double hi) {
    pm.milp.add_row(std::move(name), static_cast<int>(f), std::move(coefs), lo, hi);
  }
};

inline std::string tag(const char* base, std::initializer_list<int> idx) {
  std::string s = base;
  s += '[';
  bool first = true;
  for (int v : idx) {
    if (!first) s += ',';
    s += std::to_string(v);
    first = false;
  }
  s += ']';
  return s;
}

}  // namespace detail

/// Builds the planning MILP for a validated instance.
inline PlanningModel build(const Instance& instance, Variant variant) {
  validate(instance);
  PlanningModel pm;
  pm.instance = instance;
  pm.variant = variant;
  const Instance& in = pm.instance;
  detail::Builder b{pm, in};
  using detail::tag;
  const double q = pm.quantity_scale;
  const int K = static_cast<int>(in.machine_count());
  const int I = static_cast<int>(in.item_count());
  const int T = in.periods();
  const bool maint_on = in.options.maintenance;
  const bool single = in.options.single_shift;
  const int s0 = in.horizon.initial_shifts;
  const double l = in.horizon.shift_length;
  const auto transitions = all_transitions();
  auto hours_per_unit = [&](int i, int k) { return q / in.items[static_cast<std::size_t>(i)].rate[static_cast<std::size_t>(k)]; };

  // ---- columns ----
  pm.x.assign(static_cast<std::size_t>(K), std::vector<std::array<int, kTransitionCount>>(static_cast<std::size_t>(T)));
  for (int k = 0; k < K; ++k) {
    const auto& mk = in.machines[static_cast<std::size_t>(k)];
    const auto uk = static_cast<std::size_t>(k);
    for (int t = 1; t <= T; ++t)
      for (auto e : transitions) {
        double cost = 0.0;
        if (classify(e) == StatePartition::Purchase) cost += in.CI(uk, t);
        cost += e.head() * in.CL(uk, t) * mk.workers;
        cost += shifts_opened(e) * in.CA(uk, t) * mk.workers;
        cost += shifts_closed(e) * in.CF(uk, t) * mk.workers;
        // Period-1 transitions must start from the machine's initial state.
        const double ub = (t == 1 && e.tail() != mk.initial_state) ? 0.0 : 1.0;
        pm.x[uk][static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(e.index())] =
            b.add({Symbol::Kind::X, k + 1, e.index(), t}, 0.0, ub, VarKind::Binary, cost);
      }
  }
  pm.z.resize(static_cast<std::size_t>(T));
  pm.open.resize(static_cast<std::size_t>(T));
  pm.close.resize(static_cast<std::size_t>(T));
  for (int t = 1; t <= T; ++t)
    for (int s = 0; s < kStateCount; ++s) {
      const auto ut = static_cast<std::size_t>(t - 1);
      const auto us = static_cast<std::size_t>(s);
      double zlb = 0.0, zub = 1.0, olb = 0.0, oub = 1.0, clb = 0.0, cub = 1.0;
      if (single) {
        // One shift in every period; openings and closings follow from the pinned states.
        const double zt = s == 1 ? 1.0 : 0.0;
        const double zprev = t == 1 ? (s == s0 ? 1.0 : 0.0) : zt;
        zlb = zub = zt;
        olb = oub = std::max(0.0, zt - zprev);
        clb = cub = std::max(0.0, zprev - zt);
      }
      pm.z[ut][us] = b.add({Symbol::Kind::Z, s, t}, zlb, zub, VarKind::Binary, 0.0);
      pm.open[ut][us] = b.add({Symbol::Kind::O, s, t}, olb, oub, VarKind::Binary, in.CO(s, t));
      pm.close[ut][us] = b.add({Symbol::Kind::C, s, t}, clb, cub, VarKind::Binary, in.CC(s, t));
    }
  const bool taxed = variant == Variant::SPT;
  pm.y.assign(static_cast<std::size_t>(I),
              std::vector<std::vector<int>>(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(T), -1)));
  pm.inv.assign(static_cast<std::size_t>(I), std::vector<int>(static_cast<std::size_t>(T), -1));
  for (int t = 1; t <= T; ++t)
    for (int i = 0; i < I; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const auto& it = in.items[ui];
      for (int k = 0; k < K; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        if (!(it.rate[uk] > 0.0)) continue;
        double cost = in.CP(ui, uk, t) * q;
        if (taxed) cost += in.CT(t) * it.emission[uk] * q;
        pm.y[ui][uk][static_cast<std::size_t>(t - 1)] = b.add({Symbol::Kind::Y, i + 1, k + 1, t}, 0.0, kInf, VarKind::Continuous, cost);
      }
      double hold = in.CH(ui, t) * q;
      if (taxed) hold += in.CT(t) * it.holding_emission * q;
      pm.inv[ui][static_cast<std::size_t>(t - 1)] = b.add({Symbol::Kind::I, i + 1, t}, 0.0, kInf, VarKind::Continuous, hold);
    }
  pm.maint.assign(static_cast<std::size_t>(K), {});
  pm.clock.assign(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(T), -1));
  pm.life.assign(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(T), -1));
  pm.salvage.assign(static_cast<std::size_t>(K), std::vector<int>(static_cast<std::size_t>(T), -1));
  for (int k = 0; k < K; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const int W = maint_on ? maintenance_count_bound(in.machines[uk]) : 0;
    pm.maint[uk].assign(static_cast<std::size_t>(W), std::vector<int>(static_cast<std::size_t>(T), -1));
    for (int t = 1; t <= T; ++t) {
      const auto ut = static_cast<std::size_t>(t - 1);
      for (int w = 0; w < W; ++w)
        pm.maint[uk][static_cast<std::size_t>(w)][ut] = b.add({Symbol::Kind::M, w + 1, k + 1, t}, 0.0, 1.0, VarKind::Binary, in.CM(uk, t));
      if (maint_on) pm.clock[uk][ut] = b.add({Symbol::Kind::TM, k + 1, t}, 0.0, kInf, VarKind::Continuous, 0.0);
      pm.life[uk][ut] = b.add({Symbol::Kind::RL, k + 1, t}, 0.0, kInf, VarKind::Continuous, 0.0);
      pm.salvage[uk][ut] = b.add({Symbol::Kind::RF, k + 1, t}, 0.0, kInf, VarKind::Continuous, -in.alpha(uk, t));
    }
  }

  auto X = [&](int k, int t, int e) { return pm.x[static_cast<std::size_t>(k)][static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(e)]; };
  auto Y = [&](int i, int k, int t) { return pm.y[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)][static_cast<std::size_t>(t - 1)]; };
  auto production_hours = [&](std::vector<Coef>& row, int k, int t, double sign) {
    for (int i = 0; i < I; ++i)
      if (int c = Y(i, k, t); c >= 0) row.push_back({c, sign * hours_per_unit(i, k)});
  };

  // ---- transitions ----
  for (int k = 0; k < K; ++k) {
    const auto& mk = in.machines[static_cast<std::size_t>(k)];
    for (int t = 1; t < T; ++t)
      for (int s = 0; s < kStateCount; ++s) {
        std::vector<Coef> r;
        for (auto e : transitions) {
          if (e.tail() == s) r.push_back({X(k, t + 1, e.index()), 1.0});
          if (e.head() == s) r.push_back({X(k, t, e.index()), -1.0});
        }
        b.row(RowFamily::TransitionContinuity, tag("continuity", {k + 1, s, t}), std::move(r), 0.0, 0.0);
      }
    for (int t = 2; t <= T; ++t) {
      std::vector<Coef> r;
      for (auto e : transitions) r.push_back({X(k, t, e.index()), 1.0});
      b.row(RowFamily::OneTransition, tag("one_transition", {k + 1, t}), std::move(r), 1.0, 1.0);
    }
    if (mk.pool == MachinePool::Candidate) {
      std::vector<Coef> r;
      for (int t = 1; t <= T; ++t)
        for (auto e : transitions)
          if (classify(e) == StatePartition::Purchase) r.push_back({X(k, t, e.index()), 1.0});
      b.row(RowFamily::BuyOnce, tag("buy_once", {k + 1}), std::move(r), -kInf, 1.0);
      std::vector<Coef> init;
      for (auto e : transitions)
        if (e.tail() == 0) init.push_back({X(k, 1, e.index()), 1.0});
      b.row(RowFamily::InitialCandidate, tag("initial", {k + 1}), std::move(init), 1.0, 1.0);
    } else {
      std::vector<Coef> init;
      for (auto e : transitions)
        if (e.tail() != 0 && e.tail() == mk.initial_state) init.push_back({X(k, 1, e.index()), 1.0});
      b.row(RowFamily::InitialExisting, tag("initial", {k + 1}), std::move(init), 1.0, 1.0);
    }
  }

  // ---- shifts ----
  for (int t = 1; t <= T; ++t) {
    const auto ut = static_cast<std::size_t>(t - 1);
    std::vector<Coef> sel;
    for (int s = 0; s < kStateCount; ++s) sel.push_back({pm.z[ut][static_cast<std::size_t>(s)], 1.0});
    b.row(RowFamily::ShiftSelection, tag("shift_select", {t}), std::move(sel), 1.0, 1.0);
    for (int s = 1; s < kStateCount; ++s)
      for (int k = 0; k < K; ++k) {
        std::vector<Coef> r;
        for (auto e : transitions)
          if (is_operating(e) && e.head() == s) r.push_back({X(k, t, e.index()), 1.0});
        r.push_back({pm.z[ut][static_cast<std::size_t>(s)], -1.0});
        b.row(RowFamily::ShiftLink, tag("shift_link", {s, k + 1, t}), std::move(r), -kInf, 0.0);
      }
    for (int s = 0; s < kStateCount; ++s) {
      const auto us = static_cast<std::size_t>(s);
      if (t == 1) {
        const double z0 = s == s0 ? 1.0 : 0.0;
        b.row(RowFamily::ShiftOpen, tag("shift_open", {s, t}), {{pm.z[ut][us], 1.0}, {pm.open[ut][us], -1.0}}, -kInf, z0);
        b.row(RowFamily::ShiftClose, tag("shift_close", {s, t}), {{pm.z[ut][us], -1.0}, {pm.close[ut][us], -1.0}}, -kInf, -z0);
      } else {
        b.row(RowFamily::ShiftOpen, tag("shift_open", {s, t}),
              {{pm.z[ut][us], 1.0}, {pm.z[ut - 1][us], -1.0}, {pm.open[ut][us], -1.0}}, -kInf, 0.0);
        b.row(RowFamily::ShiftClose, tag("shift_close", {s, t}),
              {{pm.z[ut - 1][us], 1.0}, {pm.z[ut][us], -1.0}, {pm.close[ut][us], -1.0}}, -kInf, 0.0);
      }
    }
  }

  // ---- demand ----
  for (int i = 0; i < I; ++i)
    for (int t = 1; t <= T; ++t) {
      const auto ui = static_cast<std::size_t>(i);
      std::vector<Coef> r;
      for (int k = 0; k < K; ++k)
        if (int c = Y(i, k, t); c >= 0) r.push_back({c, 1.0});
      r.push_back({pm.inv[ui][static_cast<std::size_t>(t - 1)], -1.0});
      double rhs = in.demand(ui, t) / q;
      if (t > 1) r.push_back({pm.inv[ui][static_cast<std::size_t>(t - 2)], 1.0});
      else rhs -= in.items[ui].initial_inventory / q;
      b.row(RowFamily::Demand, tag("demand", {i + 1, t}), std::move(r), rhs, kInf);
    }

  // ---- maintenance ----
  for (int k = 0; k < K && maint_on; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& mk = in.machines[uk];
    const int W = static_cast<int>(pm.maint[uk].size());
    auto M = [&](int w, int t) { return pm.maint[uk][static_cast<std::size_t>(w)][static_cast<std::size_t>(t - 1)]; };
    for (int t = 1; t <= T; ++t) {
      const auto ut = static_cast<std::size_t>(t - 1);
      std::vector<Coef> r{{pm.clock[uk][ut], 1.0}};
      if (t > 1) {
        r.push_back({pm.clock[uk][ut - 1], -1.0});
        production_hours(r, k, t - 1, -1.0);
      }
      for (int w = 0; w < W; ++w) r.push_back({M(w, t), mk.fixed_time_maintenance});
      b.row(RowFamily::MaintenanceClock, tag("clock", {k + 1, t}), std::move(r), 0.0, kInf);
      b.row(RowFamily::MaintenanceClockCap, tag("clock_cap", {k + 1, t}), {{pm.clock[uk][ut], 1.0}}, -kInf,
            mk.fixed_time_maintenance);
      for (int w = 0; w + 1 < W; ++w) {
        std::vector<Coef> ord;
        for (int tau = 1; tau <= t; ++tau) ord.push_back({M(w, tau), 1.0});
        ord.push_back({M(w + 1, t), -1.0});
        b.row(RowFamily::MaintenanceOrder, tag("maint_order", {k + 1, t, w + 1}), std::move(ord), 0.0, kInf);
      }
      for (int w = 0; w < W; ++w) {
        std::vector<Coef> op{{M(w, t), 1.0}};
        for (int tau = 1; tau <= t; ++tau)
          for (auto e : transitions)
            if (is_operating(e)) op.push_back({X(k, tau, e.index()), -1.0});
        b.row(RowFamily::MaintenanceOperating, tag("maint_operating", {k + 1, t, w + 1}), std::move(op), -kInf, 0.0);
      }
    }
    for (int w = 0; w < W; ++w) {
      std::vector<Coef> once;
      for (int t = 1; t <= T; ++t) once.push_back({M(w, t), 1.0});
      b.row(RowFamily::MaintenanceOnce, tag("maint_once", {k + 1, w + 1}), std::move(once), -kInf, 1.0);
    }
  }

  // ---- capacity, useful life, salvage ----
  for (int k = 0; k < K; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& mk = in.machines[uk];
    for (int t = 1; t <= T; ++t) {
      const auto ut = static_cast<std::size_t>(t - 1);
      std::vector<Coef> cap;
      production_hours(cap, k, t, 1.0);
      for (std::size_t w = 0; w < pm.maint[uk].size(); ++w)
        cap.push_back({pm.maint[uk][w][ut], mk.maintenance_duration(w)});
      for (auto e : transitions)
        if (is_operating(e)) cap.push_back({X(k, t, e.index()), -mk.max_utilization * l * e.head()});
      b.row(RowFamily::Capacity, tag("capacity", {k + 1, t}), std::move(cap), -kInf, 0.0);

      std::vector<Coef> lim;
      production_hours(lim, k, t, 1.0);
      lim.push_back({pm.life[uk][ut], -1.0});
      b.row(RowFamily::LifeLimit, tag("life_limit", {k + 1, t}), std::move(lim), -kInf, 0.0);

      std::vector<Coef> upd{{pm.life[uk][ut], 1.0}};
      for (auto e : transitions)
        if (classify(e) == StatePartition::Purchase) upd.push_back({X(k, t, e.index()), -mk.useful_life});
      double rhs = 0.0;
      if (t > 1) {
        upd.push_back({pm.life[uk][ut - 1], -1.0});
        production_hours(upd, k, t - 1, 1.0);
      } else {
        rhs = mk.remaining_life_at_start;
      }
      b.row(RowFamily::LifeUpdate, tag("life_update", {k + 1, t}), std::move(upd), rhs, rhs);

      std::vector<Coef> sd{{pm.salvage[uk][ut], 1.0}};
      for (auto e : transitions)
        if (classify(e) == StatePartition::Discard) sd.push_back({X(k, t, e.index()), -mk.useful_life});
      b.row(RowFamily::SalvageDiscard, tag("salvage_discard", {k + 1, t}), std::move(sd), -kInf, 0.0);
      b.row(RowFamily::SalvageLife, tag("salvage_life", {k + 1, t}),
            {{pm.salvage[uk][ut], 1.0}, {pm.life[uk][ut], -1.0}}, -kInf, 0.0);
    }
  }
  return pm;
}

// ---------------------------------------------------------------------------
// Decoding

struct CostBreakdown {
  double investment = 0.0;
  double production = 0.0;
  double maintenance = 0.0;
  double labor = 0.0;
  double hiring = 0.0;
  double firing = 0.0;
  double shift_changes = 0.0;
  double holding = 0.0;
  double carbon_tax = 0.0;
  double salvage_revenue = 0.0;   // enters the objective with a negative sign

  double total() const {
    return investment + production + maintenance + labor + hiring + firing + shift_changes + holding + carbon_tax -
           salvage_revenue;
  }
};

/// Decoded solution in original units. Periods are 0-based in every container.
struct Plan {
  Variant variant = Variant::SPT;
  std::vector<std::vector<TransitionId>> transitions;     // [k][t]
  std::vector<int> shifts;                                // [t]
  std::vector<std::array<bool, kStateCount>> opened, closed;  // [t][s]
  std::vector<std::vector<std::vector<double>>> production;   // [i][k][t], units
  std::vector<std::vector<double>> inventory;             // [i][t], units
  std::vector<std::vector<std::vector<bool>>> maintenance;    // [k][w][t]
  std::vector<std::vector<double>> clock;                 // [k][t], hours (0 without maintenance)
  std::vector<std::vector<double>> remaining_life;        // [k][t], hours
  std::vector<std::vector<double>> salvage;               // [k][t], hours
  double objective = 0.0;
  CostBreakdown costs;

  int periods() const { return static_cast<int>(shifts.size()); }
};

/// Raised when a vector breaks integrality or a row of the model.
class InfeasibleVectorError : public SolverError {
 public:
  InfeasibleVectorError(std::string what, std::string row, RowFamily family, double amount)
      : SolverError(std::move(what)), row_(std::move(row)), family_(family), amount_(amount) {}
  const std::string& row() const { return row_; }
  RowFamily family() const { return family_; }
  double amount() const { return amount_; }

 private:
  std::string row_;
  RowFamily family_;
  double amount_;
};

class IntegralityError : public SolverError {
 public:
  using SolverError::SolverError;
};

inline constexpr double kIntegralityTol = 1e-6;
inline constexpr double kFeasibilityTol = 1e-6;

/// Validates a solution vector (model units) and turns it into a Plan.
inline Plan decode(const PlanningModel& pm, const std::vector<double>& xv) {
  const auto& milp = pm.milp;
  if (xv.size() != milp.num_vars())
    throw SolverError("solution vector has " + std::to_string(xv.size()) + " entries, model has " +
                      std::to_string(milp.num_vars()));
  for (std::size_t j = 0; j < xv.size(); ++j) {
    if (!std::isfinite(xv[j])) throw SolverError("non-finite value for " + milp.var(static_cast<int>(j)).name);
    if (milp.var(static_cast<int>(j)).kind == VarKind::Binary &&
        std::min(std::abs(xv[j]), std::abs(xv[j] - 1.0)) > kIntegralityTol)
      throw IntegralityError("binary " + milp.var(static_cast<int>(j)).name + " = " + std::to_string(xv[j]) +
                             " is not integral");
  }
  const auto worst = milp.worst_violation(xv);
  if (worst.amount > kFeasibilityTol) {
    if (worst.row >= 0) {
      const auto& r = milp.row(worst.row);
      throw InfeasibleVectorError("row " + r.name + " (" + to_string(static_cast<RowFamily>(r.family)) +
                                      ") violated by " + std::to_string(worst.amount),
                                  r.name, static_cast<RowFamily>(r.family), worst.amount);
    }
    throw SolverError("bound of " + milp.var(worst.col).name + " violated by " + std::to_string(worst.amount));
  }

  const Instance& in = pm.instance;
  const int K = static_cast<int>(in.machine_count());
  const int I = static_cast<int>(in.item_count());
  const int T = in.periods();
  const double q = pm.quantity_scale;
  auto val = [&](int c) { return c >= 0 ? xv[static_cast<std::size_t>(c)] : 0.0; };
  auto on = [&](int c) { return c >= 0 && xv[static_cast<std::size_t>(c)] > 0.5; };

  Plan p;
  p.variant = pm.variant;
  p.transitions.assign(static_cast<std::size_t>(K), std::vector<TransitionId>(static_cast<std::size_t>(T)));
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < T; ++t)
      for (int e = 0; e < kTransitionCount; ++e)
        if (on(pm.x[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)][static_cast<std::size_t>(e)])) {
          p.transitions[static_cast<std::size_t>(k)][static_cast<std::size_t>(t)] = TransitionId(e);
          break;
        }
  p.shifts.assign(static_cast<std::size_t>(T), 0);
  p.opened.assign(static_cast<std::size_t>(T), {});
  p.closed.assign(static_cast<std::size_t>(T), {});
  for (std::size_t t = 0; t < static_cast<std::size_t>(T); ++t)
    for (std::size_t s = 0; s < kStateCount; ++s) {
      if (on(pm.z[t][s])) p.shifts[t] = static_cast<int>(s);
      p.opened[t][s] = on(pm.open[t][s]);
      p.closed[t][s] = on(pm.close[t][s]);
    }
  p.production.assign(static_cast<std::size_t>(I),
                      std::vector<std::vector<double>>(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(T), 0.0)));
  p.inventory.assign(static_cast<std::size_t>(I), std::vector<double>(static_cast<std::size_t>(T), 0.0));
  for (std::size_t i = 0; i < static_cast<std::size_t>(I); ++i)
    for (std::size_t t = 0; t < static_cast<std::size_t>(T); ++t) {
      for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) p.production[i][k][t] = val(pm.y[i][k][t]) * q;
      p.inventory[i][t] = val(pm.inv[i][t]) * q;
    }
  p.maintenance.resize(static_cast<std::size_t>(K));
  p.clock.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(T), 0.0));
  p.remaining_life.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(T), 0.0));
  p.salvage.assign(static_cast<std::size_t>(K), std::vector<double>(static_cast<std::size_t>(T), 0.0));
  for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
    p.maintenance[k].assign(pm.maint[k].size(), std::vector<bool>(static_cast<std::size_t>(T), false));
    for (std::size_t w = 0; w < pm.maint[k].size(); ++w)
      for (std::size_t t = 0; t < static_cast<std::size_t>(T); ++t) p.maintenance[k][w][t] = on(pm.maint[k][w][t]);
    for (std::size_t t = 0; t < static_cast<std::size_t>(T); ++t) {
      p.clock[k][t] = val(pm.clock[k][t]);
      p.remaining_life[k][t] = val(pm.life[k][t]);
      p.salvage[k][t] = val(pm.salvage[k][t]);
    }
  }

  // Cost families recomputed from the decoded plan.
  auto& c = p.costs;
  for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
    const auto& mk = in.machines[k];
    for (int t = 1; t <= T; ++t) {
      const auto ut = static_cast<std::size_t>(t - 1);
      const auto e = p.transitions[k][ut];
      if (classify(e) == StatePartition::Purchase) c.investment += in.CI(k, t);
      c.labor += e.head() * in.CL(k, t) * mk.workers;
      c.hiring += shifts_opened(e) * in.CA(k, t) * mk.workers;
      c.firing += shifts_closed(e) * in.CF(k, t) * mk.workers;
      for (std::size_t w = 0; w < p.maintenance[k].size(); ++w)
        if (p.maintenance[k][w][ut]) c.maintenance += in.CM(k, t);
      c.salvage_revenue += in.alpha(k, t) * p.salvage[k][ut];
    }
  }
  for (int t = 1; t <= T; ++t) {
    const auto ut = static_cast<std::size_t>(t - 1);
    for (int s = 0; s < kStateCount; ++s) {
      if (p.opened[ut][static_cast<std::size_t>(s)]) c.shift_changes += in.CO(s, t);
      if (p.closed[ut][static_cast<std::size_t>(s)]) c.shift_changes += in.CC(s, t);
    }
    double emissions = 0.0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(I); ++i) {
      const auto& it = in.items[i];
      for (std::size_t k = 0; k < static_cast<std::size_t>(K); ++k) {
        c.production += in.CP(i, k, t) * p.production[i][k][ut];
        emissions += it.emission[k] * p.production[i][k][ut];
      }
      c.holding += in.CH(i, t) * p.inventory[i][ut];
      emissions += it.holding_emission * p.inventory[i][ut];
    }
    if (pm.variant == Variant::SPT) c.carbon_tax += in.CT(t) * emissions;
  }
  p.objective = milp.objective(xv);
  return p;
}

/// Model-level invariants of a decoded plan, checked in original units from the
/// plan alone. Returns one message per violation.
inline std::vector<std::string> plan_violations(const Plan& p, const Instance& in, double tol = 1e-6) {
  std::vector<std::string> bad;
  const int K = static_cast<int>(in.machine_count());
  const int I = static_cast<int>(in.item_count());
  const int T = in.periods();
  auto near_le = [tol](double a, double b) { return a <= b + tol * std::max(1.0, std::abs(b)); };
  if (p.periods() != T) {
    bad.push_back("plan horizon does not match instance");
    return bad;
  }
  for (int k = 0; k < K; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const auto& mk = in.machines[uk];
    const std::string tag = "machine " + mk.id;
    int purchases = 0;
    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      const auto e = p.transitions[uk][ut];
      const int prev = t == 0 ? mk.initial_state : p.transitions[uk][ut - 1].head();
      if (e.tail() != prev) bad.push_back(tag + ": transition chain broken at t=" + std::to_string(t + 1));
      if (classify(e) == StatePartition::Purchase) ++purchases;
      if (is_operating(e) && e.head() != p.shifts[ut])
        bad.push_back(tag + ": operating state differs from shift count at t=" + std::to_string(t + 1));
      double hours = 0.0;
      for (int i = 0; i < I; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        const double y = p.production[ui][uk][ut];
        if (y < -tol) bad.push_back(tag + ": negative production");
        if (y > 0.0) hours += y / in.items[ui].rate[uk];
      }
      double maint = 0.0;
      for (std::size_t w = 0; w < p.maintenance[uk].size(); ++w)
        if (p.maintenance[uk][w][ut]) maint += mk.maintenance_duration(w);
      const double avail = is_operating(e) ? mk.max_utilization * in.horizon.shift_length * e.head() : 0.0;
      if (!near_le(hours + maint, avail)) bad.push_back(tag + ": capacity exceeded at t=" + std::to_string(t + 1));
      if (!near_le(hours, p.remaining_life[uk][ut]))
        bad.push_back(tag + ": production beyond remaining life at t=" + std::to_string(t + 1));
      if (p.remaining_life[uk][ut] < -tol) bad.push_back(tag + ": negative remaining life");
      if (in.options.maintenance && !near_le(p.clock[uk][ut], mk.fixed_time_maintenance))
        bad.push_back(tag + ": maintenance clock above FTM at t=" + std::to_string(t + 1));
      const double cap = classify(e) == StatePartition::Discard ? mk.useful_life : 0.0;
      if (!near_le(p.salvage[uk][ut], std::min(cap, p.remaining_life[uk][ut])) || p.salvage[uk][ut] < -tol)
        bad.push_back(tag + ": salvage cap violated at t=" + std::to_string(t + 1));
    }
    if (mk.pool == MachinePool::Candidate && purchases > 1) bad.push_back(tag + ": bought more than once");
  }
  for (int i = 0; i < I; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    double prev = in.items[ui].initial_inventory;
    for (int t = 0; t < T; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      double made = 0.0;
      for (int k = 0; k < K; ++k) made += p.production[ui][static_cast<std::size_t>(k)][ut];
      const double inv = p.inventory[ui][ut];
      if (inv < -tol * std::max(1.0, in.items[ui].demand[ut])) bad.push_back("item " + in.items[ui].id + ": negative inventory");
      if (!near_le(in.items[ui].demand[ut], prev + made - inv))
        bad.push_back("item " + in.items[ui].id + ": demand not met at t=" + std::to_string(t + 1));
      prev = inv;
    }
  }
  if (std::abs(p.costs.total() - p.objective) > tol * std::max(1.0, std::abs(p.objective)))
    bad.push_back("cost breakdown does not sum to the objective");
  return bad;
}

}  // namespace captrans
