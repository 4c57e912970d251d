#pragma once

// Branch-and-bound over binary columns on top of the simplex LP solver, and an
// exhaustive enumeration oracle for small models.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "captrans/errors.hpp"
#include "captrans/milp.hpp"
#include "captrans/simplex.hpp"

namespace captrans {

enum class BranchingRule { MostFractional, PseudoCost };

struct SolverConfig {
  double relative_gap = 1e-4;
  double time_limit_seconds = 36000.0;
  long node_limit = std::numeric_limits<long>::max();
  BranchingRule branching = BranchingRule::MostFractional;
  std::uint64_t seed = 0;
  /// Record (node, best bound, incumbent) after every node.
  bool keep_trace = false;
};

enum class MilpStatus { Optimal, GapLimit, TimeLimit, NodeLimit, Infeasible, Unbounded };

inline std::string to_string(MilpStatus s) {
  switch (s) {
    case MilpStatus::Optimal: return "optimal";
    case MilpStatus::GapLimit: return "gap-limit";
    case MilpStatus::TimeLimit: return "time-limit";
    case MilpStatus::NodeLimit: return "node-limit";
    case MilpStatus::Infeasible: return "infeasible";
    case MilpStatus::Unbounded: return "unbounded";
  }
  return "?";
}

inline bool has_solution_status(MilpStatus s) { return s == MilpStatus::Optimal || s == MilpStatus::GapLimit; }

struct TracePoint {
  long node;
  double best_bound;
  double incumbent;
};

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  std::optional<std::vector<double>> incumbent;
  double objective = kInf;
  double best_bound = -kInf;
  double gap = kInf;
  long nodes = 0;
  long lp_iterations = 0;
  double seconds = 0.0;
  std::vector<TracePoint> trace;
};

inline double relative_gap(double incumbent, double bound) {
  if (!std::isfinite(incumbent)) return kInf;
  if (!std::isfinite(bound)) return kInf;
  return std::max(0.0, incumbent - bound) / std::max(1.0, std::abs(incumbent));
}

namespace detail {

inline bool is_integral(double v) { return std::abs(v - std::round(v)) <= 1e-6; }

/// Fixes every binary to its rounded value and re-solves the continuous part so
/// that the returned vector satisfies every row up to LP accuracy.
inline std::optional<LpResult> polish(const MilpModel& m, const std::vector<double>& x, std::vector<double> lb,
                                      std::vector<double> ub) {
  for (std::size_t j = 0; j < m.num_vars(); ++j)
    if (m.var(static_cast<int>(j)).kind == VarKind::Binary) lb[j] = ub[j] = std::round(x[j]);
  LpSolver lp(m);
  lp.set_bounds(lb, ub);
  auto r = lp.solve();
  if (r.status != LpStatus::Optimal) return std::nullopt;
  for (std::size_t j = 0; j < m.num_vars(); ++j)
    if (m.var(static_cast<int>(j)).kind == VarKind::Binary) r.x[j] = lb[j];
  return r;
}

}  // namespace detail

/// Best-first branch-and-bound on the binary columns of `model`. Diving
/// (depth-first) until the first incumbent, best-first afterwards.
inline MilpResult solve_milp(const MilpModel& model, const SolverConfig& cfg = {}) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - start).count(); };
  MilpResult res;
  const std::size_t n = model.num_vars();
  std::vector<double> root_lb(n), root_ub(n);
  for (std::size_t j = 0; j < n; ++j) {
    root_lb[j] = model.var(static_cast<int>(j)).lower;
    root_ub[j] = model.var(static_cast<int>(j)).upper;
  }
  {
    auto tb = tighten_bounds(model, root_lb, root_ub);
    if (tb.infeasible) {
      res.status = MilpStatus::Infeasible;
      res.seconds = elapsed();
      return res;
    }
    for (std::size_t j = 0; j < n; ++j)
      if (model.var(static_cast<int>(j)).kind == VarKind::Binary) {
        root_lb[j] = tb.lower[j];
        root_ub[j] = tb.upper[j];
      }
  }

  struct BoundChange {
    int col;
    double lower, upper;
  };
  struct Node {
    long id;
    int depth;
    double bound;
    std::vector<BoundChange> changes;
    Basis basis;
  };

  LpSolver lp(model);
  std::vector<Node> open;
  open.push_back(Node{0, 0, -kInf, {}, {}});
  long next_id = 1;
  double incumbent_obj = kInf;
  bool gap_pruned = false;
  double pruned_bound = kInf;   // lowest bound among subtrees dropped by the gap test
  bool incomplete = false;
  std::vector<double> pc_up(n, 0.0), pc_down(n, 0.0);
  std::vector<int> pc_up_n(n, 0), pc_down_n(n, 0);
  std::mt19937_64 rng(cfg.seed);
  std::vector<double> tie_break(n);
  for (auto& v : tie_break) v = std::uniform_real_distribution<double>(0.0, 1e-9)(rng);

  auto global_bound = [&] {
    double b = incumbent_obj;
    for (const auto& nd : open) b = std::min(b, nd.bound);
    return b;
  };
  auto prune_level = [&] {
    // Nodes whose bound cannot beat the incumbent by more than the gap target are dropped.
    return incumbent_obj - cfg.relative_gap * std::max(1.0, std::abs(incumbent_obj));
  };

  res.status = MilpStatus::Infeasible;
  bool unbounded = false;
  while (!open.empty()) {
    // Selection: LIFO while diving, then lowest bound (ties: oldest node).
    std::size_t pick = 0;
    if (!std::isfinite(incumbent_obj)) {
      pick = open.size() - 1;
    } else {
      for (std::size_t i = 1; i < open.size(); ++i)
        if (open[i].bound < open[pick].bound || (open[i].bound == open[pick].bound && open[i].id < open[pick].id))
          pick = i;
    }
    // Stop once the remaining tree cannot improve on the incumbent by more than the gap.
    if (std::isfinite(incumbent_obj) && relative_gap(incumbent_obj, global_bound()) <= cfg.relative_gap) {
      gap_pruned = true;
      break;
    }
    if (elapsed() > cfg.time_limit_seconds) {
      res.status = MilpStatus::TimeLimit;
      break;
    }
    if (res.nodes >= cfg.node_limit) {
      res.status = MilpStatus::NodeLimit;
      break;
    }
    Node node = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
    if (std::isfinite(incumbent_obj) && node.bound >= prune_level()) {
      if (node.bound < incumbent_obj) {
        gap_pruned = true;
        pruned_bound = std::min(pruned_bound, node.bound);
      }
      continue;
    }
    ++res.nodes;

    std::vector<double> lb = root_lb, ub = root_ub;
    for (const auto& c : node.changes) {
      lb[static_cast<std::size_t>(c.col)] = c.lower;
      ub[static_cast<std::size_t>(c.col)] = c.upper;
    }
    auto tb = tighten_bounds(model, lb, ub, 5);
    if (tb.infeasible) continue;
    for (std::size_t j = 0; j < n; ++j)
      if (model.var(static_cast<int>(j)).kind == VarKind::Binary) {
        lb[j] = tb.lower[j];
        ub[j] = tb.upper[j];
      }
    lp.set_bounds(lb, ub);
    if (!node.basis.empty()) lp.set_basis(node.basis);
    LpResult r = lp.solve();
    if (r.status == LpStatus::NumericalFailure || r.status == LpStatus::IterationLimit) {
      lp.reset_basis();
      r = lp.solve();
    }
    res.lp_iterations += r.iterations;
    if (r.status == LpStatus::Infeasible) continue;
    if (r.status == LpStatus::Unbounded) {
      unbounded = true;
      break;
    }
    if (r.status != LpStatus::Optimal) {
      incomplete = true;
      continue;
    }
    const double bound = std::max(node.bound, r.objective);
    if (std::isfinite(incumbent_obj) && bound >= prune_level()) {
      if (bound < incumbent_obj) {
        gap_pruned = true;
        pruned_bound = std::min(pruned_bound, bound);
      }
      if (cfg.keep_trace) res.trace.push_back({res.nodes, global_bound(), incumbent_obj});
      continue;
    }

    // Pseudo-cost bookkeeping for the branching that created this node.
    if (!node.changes.empty() && std::isfinite(node.bound)) {
      const auto& last = node.changes.back();
      const auto j = static_cast<std::size_t>(last.col);
      const double gain = std::max(0.0, r.objective - node.bound);
      if (last.lower > 0.5) { pc_up[j] += gain; ++pc_up_n[j]; }
      else { pc_down[j] += gain; ++pc_down_n[j]; }
    }

    int branch = -1;
    double best_score = -1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (model.var(static_cast<int>(j)).kind != VarKind::Binary) continue;
      const double v = r.x[j];
      const double frac = v - std::floor(v);
      if (frac <= 1e-6 || frac >= 1.0 - 1e-6) continue;
      double score;
      if (cfg.branching == BranchingRule::PseudoCost && pc_up_n[j] > 0 && pc_down_n[j] > 0) {
        const double up = pc_up[j] / pc_up_n[j] * (1.0 - frac);
        const double down = pc_down[j] / pc_down_n[j] * frac;
        score = 1.0 + std::max(1e-6, std::min(up, down)) * std::max(1e-6, std::max(up, down)) + tie_break[j];
      } else {
        score = 0.5 - std::abs(frac - 0.5);
        if (cfg.branching == BranchingRule::PseudoCost) score *= 1e-3;
      }
      if (score > best_score) {
        best_score = score;
        branch = static_cast<int>(j);
      }
    }

    if (branch < 0) {
      auto polished = detail::polish(model, r.x, lb, ub);
      if (polished && polished->objective < incumbent_obj &&
          model.worst_violation(polished->x).amount <= 1e-7 * 10.0) {
        incumbent_obj = polished->objective;
        res.incumbent = polished->x;
      } else if (!polished) {
        incomplete = true;
      }
      if (cfg.keep_trace) res.trace.push_back({res.nodes, global_bound(), incumbent_obj});
      continue;
    }

    const auto bj = static_cast<std::size_t>(branch);
    const Basis basis = lp.basis();
    Node down{next_id++, node.depth + 1, bound, node.changes, basis};
    down.changes.push_back({branch, lb[bj], 0.0});
    Node up{next_id++, node.depth + 1, bound, node.changes, basis};
    up.changes.push_back({branch, 1.0, ub[bj]});
    // While diving, the child nearest the LP value is explored first (pushed last).
    if (r.x[bj] >= 0.5) {
      open.push_back(std::move(down));
      open.push_back(std::move(up));
    } else {
      open.push_back(std::move(up));
      open.push_back(std::move(down));
    }
    if (cfg.keep_trace) res.trace.push_back({res.nodes, global_bound(), incumbent_obj});
  }

  res.seconds = elapsed();
  if (unbounded) {
    res.status = MilpStatus::Unbounded;
    res.incumbent.reset();
    return res;
  }
  res.objective = incumbent_obj;
  res.best_bound = open.empty() && !gap_pruned && !incomplete
                       ? incumbent_obj
                       : std::min({global_bound(), pruned_bound, incumbent_obj});
  if (res.incumbent) {
    res.gap = relative_gap(incumbent_obj, res.best_bound);
    if (res.status == MilpStatus::Infeasible)
      res.status = (open.empty() && !gap_pruned && !incomplete) ? MilpStatus::Optimal : MilpStatus::GapLimit;
  } else if (res.status == MilpStatus::Infeasible && incomplete) {
    throw SolverError("branch-and-bound could not solve every node relaxation");
  }
  return res;
}

class LimitError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Exact optimum by enumerating every assignment of the free binaries (after
/// bound propagation) and solving the continuous remainder at each leaf.
/// Partial assignments are cut only when some row becomes unsatisfiable.
inline MilpResult brute_force_oracle(const MilpModel& model, std::size_t max_binaries = 24) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = model.num_vars();
  std::vector<double> lb(n), ub(n);
  for (std::size_t j = 0; j < n; ++j) {
    lb[j] = model.var(static_cast<int>(j)).lower;
    ub[j] = model.var(static_cast<int>(j)).upper;
  }
  MilpResult res;
  res.status = MilpStatus::Infeasible;
  auto tb = tighten_bounds(model, lb, ub);
  if (tb.infeasible) return res;
  std::vector<int> free;
  for (std::size_t j = 0; j < n; ++j)
    if (model.var(static_cast<int>(j)).kind == VarKind::Binary) {
      lb[j] = tb.lower[j];
      ub[j] = tb.upper[j];
      if (lb[j] < ub[j]) free.push_back(static_cast<int>(j));
    }
  if (free.size() > max_binaries)
    throw LimitError("oracle limit exceeded: " + std::to_string(free.size()) + " free binaries > " +
                     std::to_string(max_binaries));

  // Rows that can be violated by binaries alone are checked on partial assignments.
  auto rows_ok = [&](const std::vector<double>& l, const std::vector<double>& u) {
    for (const auto& row : model.rows()) {
      double lo = 0.0, hi = 0.0;
      for (const auto& c : row.coefs) {
        const auto j = static_cast<std::size_t>(c.col);
        lo += c.value > 0 ? c.value * l[j] : c.value * u[j];
        hi += c.value > 0 ? c.value * u[j] : c.value * l[j];
      }
      if (std::isfinite(lo) && lo > row.upper + 1e-9) return false;
      if (std::isfinite(hi) && hi < row.lower - 1e-9) return false;
    }
    return true;
  };

  double best = kInf;
  bool unbounded = false;
  std::vector<int> assignment(free.size(), 0);
  // Iterative depth-first enumeration.
  std::vector<double> cl = lb, cu = ub;
  std::size_t depth = 0;
  std::vector<int> tried(free.size() + 1, 0);
  while (true) {
    if (depth == free.size()) {
      ++res.nodes;
      LpSolver leaf(model);
      leaf.set_bounds(cl, cu);
      auto r = leaf.solve();
      res.lp_iterations += r.iterations;
      if (r.status == LpStatus::Unbounded) unbounded = true;
      if (r.status == LpStatus::Optimal && r.objective < best) {
        best = r.objective;
        for (int j : free) r.x[static_cast<std::size_t>(j)] = cl[static_cast<std::size_t>(j)];
        res.incumbent = r.x;
      }
      if (r.status == LpStatus::NumericalFailure || r.status == LpStatus::IterationLimit)
        throw SolverError("oracle leaf LP failed: " + to_string(r.status));
      // backtrack
      if (depth == 0) break;
      --depth;
    }
    const auto j = static_cast<std::size_t>(free[depth]);
    if (tried[depth] == 2) {
      cl[j] = lb[j];
      cu[j] = ub[j];
      tried[depth] = 0;
      if (depth == 0) break;
      --depth;
      continue;
    }
    const int v = tried[depth]++;
    cl[j] = cu[j] = v;
    if (rows_ok(cl, cu)) ++depth;
  }
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (unbounded) {
    res.status = MilpStatus::Unbounded;
    res.incumbent.reset();
    return res;
  }
  if (res.incumbent) {
    res.status = MilpStatus::Optimal;
    res.objective = best;
    res.best_bound = best;
    res.gap = 0.0;
  }
  return res;
}

}  // namespace captrans
