#pragma once

// Bounded-variable revised simplex.
//
// Every row r gets a logical column s_r with a_r x - s_r = 0 and bounds
// [row.lower, row.upper], so the working problem is A_full z = 0 with only
// box constraints on z. The basis is factored with a sparse LU and updated in
// product form; it is refactored every `refactor_interval` pivots. Basic
// values and reduced costs are recomputed from the factorization on every
// iteration rather than updated incrementally.
//
// Primal simplex (composite phase 1 / phase 2) handles cold starts; the dual
// simplex re-optimizes a dual-feasible warm basis after bound changes.

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "captrans/milp.hpp"

namespace captrans {

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit, NumericalFailure };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
    case LpStatus::NumericalFailure: return "numerical-failure";
  }
  return "?";
}

struct LpResult {
  LpStatus status = LpStatus::NumericalFailure;
  double objective = kInf;
  std::vector<double> x;            // structural values, original units
  std::vector<double> row_duals;    // y, original units (Optimal only)
  /// For Infeasible: row multipliers of the phase-1 (or dual-ray) certificate.
  std::vector<double> farkas;
  double infeasibility = 0.0;       // phase-1 sum of infeasibilities on exit
  long iterations = 0;
};

struct SimplexOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-9;
  int refactor_interval = 100;
  long iteration_limit = 200000;
  int degenerate_before_bland = 50;
};

/// Basis snapshot usable for warm starts. Status codes: see LpSolver::VarStatus.
struct Basis {
  std::vector<std::int8_t> status;
  bool empty() const { return status.empty(); }
};

class LpSolver {
 public:
  enum VarStatus : std::int8_t { kBasic = 0, kAtLower = 1, kAtUpper = 2, kFree = 3 };

  explicit LpSolver(const MilpModel& model, SimplexOptions opt = {}) : opt_(opt) { load(model); }

  std::size_t num_structural() const { return n_; }
  std::size_t num_rows() const { return m_; }

  /// Replaces structural bounds (original units).
  void set_bounds(std::span<const double> lower, std::span<const double> upper) {
    for (std::size_t j = 0; j < n_; ++j) {
      lb_[j] = lower[j] / col_scale_[j];
      ub_[j] = upper[j] / col_scale_[j];
    }
    snap_nonbasic_to_bounds();
  }

  Basis basis() const { return Basis{status_}; }

  /// Loads a warm-start basis; ignored when it has the wrong shape.
  void set_basis(const Basis& b) {
    if (b.status.size() != n_ + m_) return;
    std::size_t basics = std::count(b.status.begin(), b.status.end(), kBasic);
    if (basics != m_) return;
    status_ = b.status;
    snap_nonbasic_to_bounds();
    need_refactor_ = true;
  }

  void reset_basis() { slack_basis(); }

  LpResult solve() {
    LpResult res;
    iterations_ = 0;
    if (!refactor()) {
      slack_basis();
      if (!refactor()) return fail(res);
    }
    // Warm starts that remain dual feasible go through the dual simplex.
    compute_duals(cost_);
    flip_boxed();
    compute_primal();
    LpStatus st;
    if (dual_feasible()) {
      st = dual_simplex(res);
      if (st == LpStatus::NumericalFailure) st = primal_simplex(res);
    } else {
      st = primal_simplex(res);
    }
    // Final cleanup on a fresh factorization.
    for (int attempt = 0; st == LpStatus::Optimal && attempt < 3; ++attempt) {
      if (!refactor()) return fail(res);
      compute_primal();
      compute_duals(cost_);
      if (max_primal_infeasibility() <= opt_.primal_tol && dual_feasible()) break;
      st = primal_simplex(res);
    }
    res.status = st;
    res.iterations = iterations_;
    if (st == LpStatus::Optimal) extract(res);
    return res;
  }

 private:
  // ---- setup -------------------------------------------------------------

  void load(const MilpModel& model) {
    n_ = model.num_vars();
    m_ = model.num_rows();
    const std::size_t N = n_ + m_;
    col_start_.assign(N + 1, 0);
    std::vector<std::vector<std::pair<int, double>>> cols(n_);
    for (std::size_t r = 0; r < m_; ++r)
      for (const auto& c : model.row(static_cast<int>(r)).coefs)
        if (c.value != 0.0) cols[static_cast<std::size_t>(c.col)].emplace_back(static_cast<int>(r), c.value);

    // Geometric-mean scaling of the structural matrix, rounded to powers of two.
    row_scale_.assign(m_, 1.0);
    col_scale_.assign(n_, 1.0);
    for (int pass = 0; pass < 6; ++pass) {
      std::vector<double> rmin(m_, kInf), rmax(m_, 0.0);
      for (std::size_t j = 0; j < n_; ++j)
        for (auto [r, v] : cols[j]) {
          double a = std::abs(v) * col_scale_[j] * row_scale_[static_cast<std::size_t>(r)];
          rmin[static_cast<std::size_t>(r)] = std::min(rmin[static_cast<std::size_t>(r)], a);
          rmax[static_cast<std::size_t>(r)] = std::max(rmax[static_cast<std::size_t>(r)], a);
        }
      for (std::size_t r = 0; r < m_; ++r)
        if (rmax[r] > 0.0) row_scale_[r] /= std::sqrt(rmin[r] * rmax[r]);
      for (std::size_t j = 0; j < n_; ++j) {
        double cmin = kInf, cmax = 0.0;
        for (auto [r, v] : cols[j]) {
          double a = std::abs(v) * col_scale_[j] * row_scale_[static_cast<std::size_t>(r)];
          cmin = std::min(cmin, a);
          cmax = std::max(cmax, a);
        }
        if (cmax > 0.0) col_scale_[j] /= std::sqrt(cmin * cmax);
      }
    }
    auto pow2 = [](double s) { return std::exp2(std::round(std::log2(s))); };
    for (auto& s : row_scale_) s = pow2(s);
    for (auto& s : col_scale_) s = pow2(s);

    col_row_.clear();
    col_val_.clear();
    for (std::size_t j = 0; j < n_; ++j) {
      col_start_[j] = static_cast<int>(col_row_.size());
      for (auto [r, v] : cols[j]) {
        col_row_.push_back(r);
        col_val_.push_back(v * col_scale_[j] * row_scale_[static_cast<std::size_t>(r)]);
      }
    }
    for (std::size_t r = 0; r < m_; ++r) {
      col_start_[n_ + r] = static_cast<int>(col_row_.size());
      col_row_.push_back(static_cast<int>(r));
      col_val_.push_back(-1.0);
    }
    col_start_[N] = static_cast<int>(col_row_.size());

    lb_.assign(N, 0.0);
    ub_.assign(N, 0.0);
    cost_.assign(N, 0.0);
    double cmax = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const auto& v = model.var(static_cast<int>(j));
      lb_[j] = v.lower / col_scale_[j];
      ub_[j] = v.upper / col_scale_[j];
      cost_[j] = v.cost * col_scale_[j];
      cmax = std::max(cmax, std::abs(cost_[j]));
    }
    cost_scale_ = cmax > 0.0 ? 1.0 / pow2(cmax) : 1.0;
    for (std::size_t j = 0; j < n_; ++j) cost_[j] *= cost_scale_;
    obj_offset_ = model.objective_offset();
    orig_cost_.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) orig_cost_[j] = model.var(static_cast<int>(j)).cost;
    for (std::size_t r = 0; r < m_; ++r) {
      const auto& row = model.row(static_cast<int>(r));
      lb_[n_ + r] = row.lower * row_scale_[r];
      ub_[n_ + r] = row.upper * row_scale_[r];
    }
    x_.assign(N, 0.0);
    slack_basis();
  }

  void slack_basis() {
    status_.assign(n_ + m_, kAtLower);
    for (std::size_t r = 0; r < m_; ++r) status_[n_ + r] = kBasic;
    snap_nonbasic_to_bounds();
    need_refactor_ = true;
  }

  void snap_nonbasic_to_bounds() {
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic) continue;
      const bool lf = std::isfinite(lb_[j]), uf = std::isfinite(ub_[j]);
      if (status_[j] == kAtUpper && uf) x_[j] = ub_[j];
      else if (lf) { status_[j] = kAtLower; x_[j] = lb_[j]; }
      else if (uf) { status_[j] = kAtUpper; x_[j] = ub_[j]; }
      else { status_[j] = kFree; x_[j] = 0.0; }
    }
  }

  // ---- linear algebra ----------------------------------------------------

  bool refactor() {
    head_.clear();
    for (std::size_t j = 0; j < n_ + m_; ++j)
      if (status_[j] == kBasic) head_.push_back(static_cast<int>(j));
    if (head_.size() != m_) return false;
    etas_.clear();
    need_refactor_ = false;
    if (m_ == 0) return true;
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t p = 0; p < m_; ++p) {
      const int j = head_[p];
      for (int q = col_start_[static_cast<std::size_t>(j)]; q < col_start_[static_cast<std::size_t>(j) + 1]; ++q)
        trip.emplace_back(col_row_[static_cast<std::size_t>(q)], static_cast<int>(p), col_val_[static_cast<std::size_t>(q)]);
    }
    Eigen::SparseMatrix<double> B(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
    B.setFromTriplets(trip.begin(), trip.end());
    B.makeCompressed();
    lu_.analyzePattern(B);
    lu_.factorize(B);
    if (lu_.info() != Eigen::Success) return false;
    // Reject numerically singular bases: check a solve against a probe vector.
    Eigen::VectorXd probe = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m_));
    Eigen::VectorXd sol = lu_.solve(probe);
    if (!sol.allFinite()) return false;
    Eigen::VectorXd back = B * sol;
    if ((back - probe).lpNorm<Eigen::Infinity>() > 1e-6) return false;
    return true;
  }

  // B^{-1} v
  Eigen::VectorXd ftran(Eigen::VectorXd v) {
    if (m_ == 0) return v;
    v = lu_.solve(v).eval();
    for (const auto& e : etas_) {
      const double xr = v[e.pos] / e.pivot;
      if (xr != 0.0)
        for (std::size_t q = 0; q < e.idx.size(); ++q) v[e.idx[q]] -= e.val[q] * xr;
      v[e.pos] = xr;
    }
    return v;
  }

  // B^{-T} v
  Eigen::VectorXd btran(Eigen::VectorXd v) {
    if (m_ == 0) return v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double s = v[it->pos];
      for (std::size_t q = 0; q < it->idx.size(); ++q) s -= it->val[q] * v[it->idx[q]];
      v[it->pos] = s / it->pivot;
    }
    return lu_.transpose().solve(v).eval();
  }

  Eigen::VectorXd column(int j) const {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for (int q = col_start_[static_cast<std::size_t>(j)]; q < col_start_[static_cast<std::size_t>(j) + 1]; ++q)
      a[col_row_[static_cast<std::size_t>(q)]] = col_val_[static_cast<std::size_t>(q)];
    return a;
  }

  double dot_column(int j, const Eigen::VectorXd& y) const {
    double s = 0.0;
    for (int q = col_start_[static_cast<std::size_t>(j)]; q < col_start_[static_cast<std::size_t>(j) + 1]; ++q)
      s += col_val_[static_cast<std::size_t>(q)] * y[col_row_[static_cast<std::size_t>(q)]];
    return s;
  }

  void compute_primal() {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic || x_[j] == 0.0) continue;
      for (int q = col_start_[j]; q < col_start_[j + 1]; ++q)
        rhs[col_row_[static_cast<std::size_t>(q)]] -= col_val_[static_cast<std::size_t>(q)] * x_[j];
    }
    Eigen::VectorXd xb = ftran(rhs);
    for (std::size_t p = 0; p < m_; ++p) x_[static_cast<std::size_t>(head_[p])] = xb[static_cast<Eigen::Index>(p)];
  }

  void compute_duals(const std::vector<double>& c) {
    Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
    for (std::size_t p = 0; p < m_; ++p) cb[static_cast<Eigen::Index>(p)] = c[static_cast<std::size_t>(head_[p])];
    y_ = btran(cb);
    d_.assign(n_ + m_, 0.0);
    for (std::size_t j = 0; j < n_ + m_; ++j)
      if (status_[j] != kBasic) d_[j] = c[j] - dot_column(static_cast<int>(j), y_);
  }

  double infeasibility_of(std::size_t j) const {
    if (x_[j] < lb_[j] - opt_.primal_tol) return lb_[j] - x_[j];
    if (x_[j] > ub_[j] + opt_.primal_tol) return x_[j] - ub_[j];
    return 0.0;
  }

  double max_primal_infeasibility() const {
    double w = 0.0;
    for (int j : head_) w = std::max(w, infeasibility_of(static_cast<std::size_t>(j)));
    return w;
  }

  bool dual_feasible() const {
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic || lb_[j] == ub_[j]) continue;
      if (status_[j] == kAtLower && d_[j] < -opt_.dual_tol) return false;
      if (status_[j] == kAtUpper && d_[j] > opt_.dual_tol) return false;
      if (status_[j] == kFree && std::abs(d_[j]) > opt_.dual_tol) return false;
    }
    return true;
  }

  /// Moves boxed nonbasics whose reduced cost has the wrong sign to the opposite
  /// bound; returns true when anything moved.
  bool flip_boxed() {
    bool moved = false;
    for (std::size_t j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic || lb_[j] == ub_[j] || !std::isfinite(lb_[j]) || !std::isfinite(ub_[j])) continue;
      if (status_[j] == kAtLower && d_[j] < -opt_.dual_tol) { status_[j] = kAtUpper; x_[j] = ub_[j]; moved = true; }
      else if (status_[j] == kAtUpper && d_[j] > opt_.dual_tol) { status_[j] = kAtLower; x_[j] = lb_[j]; moved = true; }
    }
    return moved;
  }

  struct Eta {
    Eigen::Index pos;
    double pivot;
    std::vector<Eigen::Index> idx;
    std::vector<double> val;
  };

  bool pivot(std::size_t pos, int entering, const Eigen::VectorXd& alpha, std::int8_t leaving_status) {
    const int leaving = head_[pos];
    status_[static_cast<std::size_t>(leaving)] = leaving_status;
    x_[static_cast<std::size_t>(leaving)] =
        leaving_status == kAtUpper ? ub_[static_cast<std::size_t>(leaving)] : lb_[static_cast<std::size_t>(leaving)];
    if (leaving_status == kFree) x_[static_cast<std::size_t>(leaving)] = 0.0;
    status_[static_cast<std::size_t>(entering)] = kBasic;
    head_[pos] = entering;
    ++iterations_;
    if (static_cast<int>(etas_.size()) + 1 >= opt_.refactor_interval) return refactor();
    Eta e;
    e.pos = static_cast<Eigen::Index>(pos);
    e.pivot = alpha[e.pos];
    for (Eigen::Index i = 0; i < alpha.size(); ++i)
      if (i != e.pos && alpha[i] != 0.0) {
        e.idx.push_back(i);
        e.val.push_back(alpha[i]);
      }
    etas_.push_back(std::move(e));
    return true;
  }

  // ---- primal simplex ----------------------------------------------------

  LpStatus primal_simplex(LpResult& res) {
    const std::size_t N = n_ + m_;
    std::vector<double> phase_cost(N, 0.0);
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= opt_.iteration_limit) return LpStatus::IterationLimit;
      compute_primal();
      // Phase selection: minimize infeasibility first.
      double sum_inf = 0.0;
      bool phase1 = false;
      std::fill(phase_cost.begin(), phase_cost.end(), 0.0);
      for (int j : head_) {
        const auto u = static_cast<std::size_t>(j);
        if (x_[u] < lb_[u] - opt_.primal_tol) { phase_cost[u] = -1.0; sum_inf += lb_[u] - x_[u]; phase1 = true; }
        else if (x_[u] > ub_[u] + opt_.primal_tol) { phase_cost[u] = 1.0; sum_inf += x_[u] - ub_[u]; phase1 = true; }
      }
      compute_duals(phase1 ? phase_cost : cost_);

      const bool bland = degenerate_run >= opt_.degenerate_before_bland;
      int q = -1;
      double best = 0.0;
      for (std::size_t j = 0; j < N; ++j) {
        if (status_[j] == kBasic || lb_[j] == ub_[j]) continue;
        const double dj = d_[j];
        double score = 0.0;
        if (status_[j] == kAtLower && dj < -opt_.dual_tol) score = -dj;
        else if (status_[j] == kAtUpper && dj > opt_.dual_tol) score = dj;
        else if (status_[j] == kFree && std::abs(dj) > opt_.dual_tol) score = std::abs(dj);
        if (score <= 0.0) continue;
        if (bland) { q = static_cast<int>(j); break; }
        if (score > best) { best = score; q = static_cast<int>(j); }
      }
      if (q < 0) {
        if (phase1) {
          res.infeasibility = sum_inf;
          res.farkas.resize(m_);
          for (std::size_t r = 0; r < m_; ++r) res.farkas[r] = y_[static_cast<Eigen::Index>(r)] * row_scale_[r];
          return LpStatus::Infeasible;
        }
        return LpStatus::Optimal;
      }
      const auto uq = static_cast<std::size_t>(q);
      const double dir = d_[uq] < 0.0 ? 1.0 : -1.0;
      Eigen::VectorXd alpha = ftran(column(q));

      // Harris two-pass ratio test. Basic p moves by -dir * alpha_p per unit step.
      double theta_max = kInf;
      auto relaxed_limit = [&](std::size_t p, double rate) {
        const auto j = static_cast<std::size_t>(head_[p]);
        const double xj = x_[j];
        if (rate < 0.0) {
          if (phase1 && xj < lb_[j] - opt_.primal_tol) return kInf;
          if (phase1 && xj > ub_[j] + opt_.primal_tol) return (xj - ub_[j]) / -rate;
          return std::isfinite(lb_[j]) ? (xj - lb_[j] + opt_.primal_tol) / -rate : kInf;
        }
        if (phase1 && xj > ub_[j] + opt_.primal_tol) return kInf;
        if (phase1 && xj < lb_[j] - opt_.primal_tol) return (lb_[j] - xj) / rate;
        return std::isfinite(ub_[j]) ? (ub_[j] - xj + opt_.primal_tol) / rate : kInf;
      };
      auto exact_limit = [&](std::size_t p, double rate, std::int8_t& bound) {
        const auto j = static_cast<std::size_t>(head_[p]);
        const double xj = x_[j];
        if (rate < 0.0) {
          if (phase1 && xj < lb_[j] - opt_.primal_tol) return kInf;
          if (phase1 && xj > ub_[j] + opt_.primal_tol) { bound = kAtUpper; return (xj - ub_[j]) / -rate; }
          bound = kAtLower;
          return std::max(0.0, (xj - lb_[j]) / -rate);
        }
        if (phase1 && xj > ub_[j] + opt_.primal_tol) return kInf;
        if (phase1 && xj < lb_[j] - opt_.primal_tol) { bound = kAtLower; return (lb_[j] - xj) / rate; }
        bound = kAtUpper;
        return std::max(0.0, (ub_[j] - xj) / rate);
      };
      for (std::size_t p = 0; p < m_; ++p) {
        const double rate = -dir * alpha[static_cast<Eigen::Index>(p)];
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        theta_max = std::min(theta_max, relaxed_limit(p, rate));
      }
      const double flip = ub_[uq] - lb_[uq];
      if (!std::isfinite(theta_max) && !std::isfinite(flip)) {
        if (phase1) return LpStatus::NumericalFailure;
        return LpStatus::Unbounded;
      }
      long leave = -1;
      double theta = kInf, best_alpha = 0.0;
      std::int8_t leave_bound = kAtLower;
      for (std::size_t p = 0; p < m_; ++p) {
        const double rate = -dir * alpha[static_cast<Eigen::Index>(p)];
        if (std::abs(rate) <= opt_.pivot_tol) continue;
        std::int8_t bound = kAtLower;
        double lim = exact_limit(p, rate, bound);
        if (!std::isfinite(lim) || lim > theta_max) continue;
        const double a = std::abs(rate);
        const bool better = bland ? (leave < 0 || head_[p] < head_[static_cast<std::size_t>(leave)])
                                  : (a > best_alpha);
        if (better) {
          leave = static_cast<long>(p);
          best_alpha = a;
          theta = lim;
          leave_bound = bound;
        }
      }
      if (std::isfinite(flip) && (leave < 0 || flip <= theta)) {
        // Entering variable reaches its opposite bound first.
        status_[uq] = dir > 0 ? kAtUpper : kAtLower;
        x_[uq] = dir > 0 ? ub_[uq] : lb_[uq];
        ++iterations_;
        degenerate_run = 0;
        continue;
      }
      if (leave < 0) return phase1 ? LpStatus::NumericalFailure : LpStatus::Unbounded;
      degenerate_run = theta <= 1e-12 ? degenerate_run + 1 : 0;
      if (!pivot(static_cast<std::size_t>(leave), q, alpha, leave_bound)) {
        if (!recover()) return LpStatus::NumericalFailure;
      }
    }
  }

  // ---- dual simplex ------------------------------------------------------

  LpStatus dual_simplex(LpResult& res) {
    const std::size_t N = n_ + m_;
    int degenerate_run = 0;
    while (true) {
      if (iterations_ >= opt_.iteration_limit) return LpStatus::IterationLimit;
      compute_duals(cost_);
      flip_boxed();
      compute_primal();
      if (!dual_feasible()) return LpStatus::NumericalFailure;
      const bool bland = degenerate_run >= opt_.degenerate_before_bland;
      // Leaving row: largest primal infeasibility (lowest basic index under Bland).
      long r = -1;
      double worst = opt_.primal_tol;
      for (std::size_t p = 0; p < m_; ++p) {
        const double inf = infeasibility_of(static_cast<std::size_t>(head_[p]));
        if (inf <= opt_.primal_tol) continue;
        if (bland ? (r < 0 || head_[p] < head_[static_cast<std::size_t>(r)]) : inf > worst) {
          worst = inf;
          r = static_cast<long>(p);
        }
      }
      if (r < 0) return LpStatus::Optimal;
      const auto leaving = static_cast<std::size_t>(head_[static_cast<std::size_t>(r)]);
      const bool to_lower = x_[leaving] < lb_[leaving];
      Eigen::VectorXd er = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
      er[r] = 1.0;
      Eigen::VectorXd rho = btran(er);

      // Textbook dual ratio test; near-ties go to the largest pivot (lowest index under Bland).
      std::vector<std::tuple<std::size_t, double, double>> cand;
      double min_ratio = kInf;
      for (std::size_t j = 0; j < N; ++j) {
        if (status_[j] == kBasic || lb_[j] == ub_[j]) continue;
        const double a = dot_column(static_cast<int>(j), rho);
        if (std::abs(a) <= opt_.pivot_tol) continue;
        // Sign so that a positive value means j is eligible.
        const double s = to_lower ? -a : a;
        bool eligible = false;
        if (status_[j] == kAtLower) eligible = s > 0.0;
        else if (status_[j] == kAtUpper) eligible = s < 0.0;
        else eligible = true;
        if (!eligible) continue;
        const double ratio = std::abs(d_[j]) / std::abs(a);
        cand.emplace_back(j, a, ratio);
        min_ratio = std::min(min_ratio, ratio);
      }
      if (cand.empty()) {
        res.farkas.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) res.farkas[i] = rho[static_cast<Eigen::Index>(i)] * row_scale_[i];
        res.infeasibility = worst;
        return LpStatus::Infeasible;
      }
      long q = -1;
      double best_a = 0.0;
      const double tie = min_ratio + 1e-9 * (1.0 + min_ratio);
      for (auto [j, a, ratio] : cand) {
        if (ratio > tie) continue;
        if (bland ? q < 0 : std::abs(a) > best_a) {
          best_a = std::abs(a);
          q = static_cast<long>(j);
        }
      }
      degenerate_run = min_ratio <= 1e-12 ? degenerate_run + 1 : 0;
      Eigen::VectorXd alpha = ftran(column(static_cast<int>(q)));
      if (std::abs(alpha[r]) <= opt_.pivot_tol) {
        if (!refactor()) return LpStatus::NumericalFailure;
        continue;
      }
      if (!pivot(static_cast<std::size_t>(r), static_cast<int>(q), alpha, to_lower ? kAtLower : kAtUpper)) {
        recover();
        return LpStatus::NumericalFailure;
      }
    }
  }

  bool recover() {
    slack_basis();
    return refactor();
  }

  LpResult& fail(LpResult& res) {
    res.status = LpStatus::NumericalFailure;
    res.iterations = iterations_;
    return res;
  }

  void extract(LpResult& res) {
    res.x.resize(n_);
    for (std::size_t j = 0; j < n_; ++j) {
      double v = x_[j];
      // Snap values within tolerance of a bound onto it.
      if (std::abs(v - lb_[j]) <= opt_.primal_tol) v = lb_[j];
      else if (std::abs(v - ub_[j]) <= opt_.primal_tol) v = ub_[j];
      res.x[j] = v * col_scale_[j];
    }
    res.objective = obj_offset_;
    for (std::size_t j = 0; j < n_; ++j) res.objective += orig_cost_[j] * res.x[j];
    res.row_duals.resize(m_);
    for (std::size_t r = 0; r < m_; ++r)
      res.row_duals[r] = y_[static_cast<Eigen::Index>(r)] * row_scale_[r] / cost_scale_;
  }

  SimplexOptions opt_;
  std::size_t n_ = 0, m_ = 0;
  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<double> row_scale_, col_scale_;
  double cost_scale_ = 1.0, obj_offset_ = 0.0;
  std::vector<double> lb_, ub_, cost_, orig_cost_, x_, d_;
  std::vector<std::int8_t> status_;
  std::vector<int> head_;
  std::vector<Eta> etas_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  Eigen::VectorXd y_;
  bool need_refactor_ = true;
  long iterations_ = 0;
};

/// Solves the LP relaxation of `model` (integrality ignored) from a cold start.
inline LpResult solve_lp(const MilpModel& model, SimplexOptions opt = {}) {
  LpSolver solver(model, opt);
  return solver.solve();
}

}  // namespace captrans
