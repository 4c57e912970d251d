#pragma once

// Sparse mixed-integer linear program in row form:
//   minimize  c'x + offset
//   s.t.      lo_r <= a_r x <= hi_r   for every row r
//             lb_j <= x_j <= ub_j,    x_j binary for integer columns

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "captrans/errors.hpp"

namespace captrans {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarKind { Continuous, Binary };

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInf;
  VarKind kind = VarKind::Continuous;
  double cost = 0.0;
};

struct Coef {
  int col = 0;
  double value = 0.0;
};

struct Row {
  std::string name;
  int family = 0;            // caller-defined grouping tag
  std::vector<Coef> coefs;
  double lower = -kInf;
  double upper = kInf;
};

/// Worst row violation of a candidate vector.
struct Violation {
  int row = -1;              // -1 when the worst offence is a column bound
  int col = -1;
  double amount = 0.0;
};

class MilpModel {
 public:
  int add_variable(Variable v) {
    vars_.push_back(std::move(v));
    return static_cast<int>(vars_.size()) - 1;
  }

  int add_row(Row r) {
    rows_.push_back(std::move(r));
    return static_cast<int>(rows_.size()) - 1;
  }

  int add_row(std::string name, int family, std::vector<Coef> coefs, double lower, double upper) {
    return add_row(Row{std::move(name), family, std::move(coefs), lower, upper});
  }

  std::size_t num_vars() const { return vars_.size(); }
  std::size_t num_rows() const { return rows_.size(); }
  const std::vector<Variable>& vars() const { return vars_; }
  std::vector<Variable>& vars() { return vars_; }
  const std::vector<Row>& rows() const { return rows_; }
  const Variable& var(int j) const { return vars_[static_cast<std::size_t>(j)]; }
  Variable& var(int j) { return vars_[static_cast<std::size_t>(j)]; }
  const Row& row(int r) const { return rows_[static_cast<std::size_t>(r)]; }

  double objective_offset() const { return offset_; }
  void set_objective_offset(double v) { offset_ = v; }

  std::size_t binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(vars_.begin(), vars_.end(), [](const Variable& v) { return v.kind == VarKind::Binary; }));
  }

  double objective(const std::vector<double>& x) const {
    double z = offset_;
    for (std::size_t j = 0; j < vars_.size(); ++j) z += vars_[j].cost * x[j];
    return z;
  }

  double activity(int r, const std::vector<double>& x) const {
    double a = 0.0;
    for (const auto& c : row(r).coefs) a += c.value * x[static_cast<std::size_t>(c.col)];
    return a;
  }

  /// Largest bound or row violation (absolute) of x.
  Violation worst_violation(const std::vector<double>& x) const {
    Violation worst;
    for (std::size_t j = 0; j < vars_.size(); ++j) {
      double over = std::max(vars_[j].lower - x[j], x[j] - vars_[j].upper);
      if (over > worst.amount) worst = {-1, static_cast<int>(j), over};
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
      double a = activity(static_cast<int>(r), x);
      double over = std::max(rows_[r].lower - a, a - rows_[r].upper);
      if (over > worst.amount) worst = {static_cast<int>(r), -1, over};
    }
    return worst;
  }

  /// Index of the variable with the given name, or -1.
  int find(const std::string& name) const {
    if (index_.size() != vars_.size()) {
      index_.clear();
      for (std::size_t j = 0; j < vars_.size(); ++j) index_.emplace(vars_[j].name, static_cast<int>(j));
    }
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<Row> rows_;
  double offset_ = 0.0;
  mutable std::unordered_map<std::string, int> index_;
};

/// Bounds after activity-based propagation; `infeasible` is set when some row
/// cannot be satisfied within the bounds.
struct TightenedBounds {
  std::vector<double> lower;
  std::vector<double> upper;
  bool infeasible = false;
};

/// Iterated activity-based bound tightening. Binary bounds are rounded to {0,1}.
inline TightenedBounds tighten_bounds(const MilpModel& m, std::vector<double> lower, std::vector<double> upper,
                                      int max_passes = 20) {
  constexpr double eps = 1e-9;
  TightenedBounds out{std::move(lower), std::move(upper), false};
  auto& lb = out.lower;
  auto& ub = out.upper;
  const auto& vars = m.vars();
  for (std::size_t j = 0; j < vars.size(); ++j)
    if (vars[j].kind == VarKind::Binary) {
      lb[j] = std::ceil(lb[j] - 1e-6);
      ub[j] = std::floor(ub[j] + 1e-6);
    }

  for (int pass = 0; pass < max_passes; ++pass) {
    bool changed = false;
    for (const auto& row : m.rows()) {
      // Minimum and maximum activity with counts of infinite contributions.
      double min_act = 0.0, max_act = 0.0;
      int min_inf = 0, max_inf = 0;
      for (const auto& c : row.coefs) {
        const auto j = static_cast<std::size_t>(c.col);
        if (c.value > 0) {
          if (std::isinf(lb[j])) ++min_inf; else min_act += c.value * lb[j];
          if (std::isinf(ub[j])) ++max_inf; else max_act += c.value * ub[j];
        } else {
          if (std::isinf(ub[j])) ++min_inf; else min_act += c.value * ub[j];
          if (std::isinf(lb[j])) ++max_inf; else max_act += c.value * lb[j];
        }
      }
      const double tol = 1e-6 * (1.0 + std::abs(row.upper < kInf ? row.upper : row.lower));
      if ((min_inf == 0 && min_act > row.upper + tol) || (max_inf == 0 && max_act < row.lower - tol)) {
        out.infeasible = true;
        return out;
      }
      for (const auto& c : row.coefs) {
        const auto j = static_cast<std::size_t>(c.col);
        const double a = c.value;
        // Residual activity of the other columns.
        double rmin, rmax;
        int rmin_inf = min_inf, rmax_inf = max_inf;
        if (a > 0) {
          if (std::isinf(lb[j])) { --rmin_inf; rmin = min_act; } else rmin = min_act - a * lb[j];
          if (std::isinf(ub[j])) { --rmax_inf; rmax = max_act; } else rmax = max_act - a * ub[j];
        } else {
          if (std::isinf(ub[j])) { --rmin_inf; rmin = min_act; } else rmin = min_act - a * ub[j];
          if (std::isinf(lb[j])) { --rmax_inf; rmax = max_act; } else rmax = max_act - a * lb[j];
        }
        double new_lb = lb[j], new_ub = ub[j];
        if (row.upper < kInf && rmin_inf == 0) {
          double bound = (row.upper - rmin) / a;
          if (a > 0) new_ub = std::min(new_ub, bound); else new_lb = std::max(new_lb, bound);
        }
        if (row.lower > -kInf && rmax_inf == 0) {
          double bound = (row.lower - rmax) / a;
          if (a > 0) new_lb = std::max(new_lb, bound); else new_ub = std::min(new_ub, bound);
        }
        if (vars[j].kind == VarKind::Binary) {
          new_lb = std::ceil(new_lb - 1e-6);
          new_ub = std::floor(new_ub + 1e-6);
        }
        // Stale activities only ever loosen the derived bounds. Continuous bounds move
        // only on substantial progress so propagation terminates.
        const bool binary = vars[j].kind == VarKind::Binary;
        if (new_lb > lb[j] + eps * (1.0 + std::abs(lb[j])) &&
            (binary || new_lb - lb[j] > 1e-3 * (1.0 + std::abs(new_lb)))) {
          lb[j] = new_lb;
          changed = true;
        }
        if (new_ub < ub[j] - eps * (1.0 + std::abs(ub[j])) &&
            (binary || ub[j] - new_ub > 1e-3 * (1.0 + std::abs(new_ub)))) {
          ub[j] = new_ub;
          changed = true;
        }
        if (lb[j] > ub[j] + 1e-6) {
          out.infeasible = true;
          return out;
        }
      }
    }
    if (!changed) break;
  }
  return out;
}

}  // namespace captrans
