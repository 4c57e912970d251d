#pragma once

// Effectiveness measures of a plan: emissions per period, technology transition
// levels, inverse-emission technology weights and the transition period.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "captrans/errors.hpp"
#include "captrans/instance.hpp"
#include "captrans/model.hpp"

namespace captrans {

class DegenerateWeightsError : public Error {
 public:
  using Error::Error;
};

/// E^t = sum_i (sum_k ep_ik Y_ik^t + eh_i I_i^t), one entry per plan period.
inline std::vector<double> emissions_by_period(const Plan& p, const Instance& in) {
  std::vector<double> e(static_cast<std::size_t>(p.periods()), 0.0);
  for (std::size_t i = 0; i < in.item_count(); ++i) {
    const auto& it = in.items[i];
    for (std::size_t t = 0; t < e.size(); ++t) {
      for (std::size_t k = 0; k < in.machine_count(); ++k) e[t] += it.emission[k] * p.production[i][k][t];
      e[t] += it.holding_emission * p.inventory[i][t];
    }
  }
  return e;
}

/// eta_j: mean over the technology's machines of the summed item emission factors.
inline std::vector<double> mean_technology_emissions(const Instance& in) {
  std::vector<double> eta(in.technologies.size(), 0.0);
  for (std::size_t j = 0; j < eta.size(); ++j) {
    const auto& members = in.technologies[j].machines;
    if (members.empty()) throw DegenerateWeightsError("technology " + in.technologies[j].id + " has no machines");
    for (auto k : members)
      for (const auto& it : in.items) eta[j] += it.emission[k];
    eta[j] /= static_cast<double>(members.size());
  }
  return eta;
}

/// Index of the technology with the largest mean emissions (lowest index on ties).
inline std::size_t dirtiest_technology(const Instance& in) {
  const auto eta = mean_technology_emissions(in);
  return static_cast<std::size_t>(std::max_element(eta.begin(), eta.end()) - eta.begin());
}

/// gamma_j = (1/eta_j - min 1/eta) / sum_j (1/eta_j - min 1/eta).
inline std::vector<double> technology_weights(const std::vector<double>& eta) {
  if (eta.size() < 2) throw DegenerateWeightsError("technology weights need at least two technologies");
  std::vector<double> inv(eta.size());
  for (std::size_t j = 0; j < eta.size(); ++j) {
    if (!(eta[j] > 0.0)) throw DegenerateWeightsError("technology mean emissions must be positive");
    inv[j] = 1.0 / eta[j];
  }
  const double lo = *std::min_element(inv.begin(), inv.end());
  double total = 0.0;
  for (auto& v : inv) total += (v -= lo);
  if (!(total > 0.0)) throw DegenerateWeightsError("all technologies have the same mean emissions");
  for (auto& v : inv) v /= total;
  return inv;
}

inline std::vector<double> technology_weights(const Instance& in) {
  return technology_weights(mean_technology_emissions(in));
}

/// R_j^t as the share of period-t production made on technology j, indexed [j][t].
/// Periods without production repeat the previous period; leading idle periods
/// are attributed entirely to the dirtiest technology.
inline std::vector<std::vector<double>> transition_levels(const Plan& p, const Instance& in) {
  const std::size_t J = in.technologies.size();
  const auto T = static_cast<std::size_t>(p.periods());
  std::vector<std::vector<double>> R(J, std::vector<double>(T, 0.0));
  std::vector<double> last(J, 0.0);
  last[J > 1 ? dirtiest_technology(in) : 0] = 1.0;
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> made(J, 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < in.item_count(); ++i)
      for (std::size_t k = 0; k < in.machine_count(); ++k) {
        made[in.machines[k].technology] += p.production[i][k][t];
        total += p.production[i][k][t];
      }
    if (total > 0.0)
      for (std::size_t j = 0; j < J; ++j) last[j] = made[j] / total;
    for (std::size_t j = 0; j < J; ++j) R[j][t] = last[j];
  }
  return R;
}

/// sum_j gamma_j R_j^t for every period.
inline std::vector<double> weighted_levels(const std::vector<std::vector<double>>& R, const std::vector<double>& gamma) {
  std::vector<double> w(R.empty() ? 0 : R[0].size(), 0.0);
  for (std::size_t j = 0; j < R.size(); ++j)
    for (std::size_t t = 0; t < w.size(); ++t) w[t] += gamma[j] * R[j][t];
  return w;
}

/// First 1-based period whose weighted level reaches beta; nullopt means never.
inline std::optional<int> transition_period(const std::vector<double>& weighted, double beta) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw Error("beta must lie in [0,1]");
  for (std::size_t t = 0; t < weighted.size(); ++t)
    if (weighted[t] >= beta) return static_cast<int>(t) + 1;
  return std::nullopt;
}

inline std::optional<int> transition_period(const std::vector<std::vector<double>>& R, const std::vector<double>& gamma,
                                            double beta) {
  return transition_period(weighted_levels(R, gamma), beta);
}

struct EffectivenessReport {
  int periods = 0;                              // reported decision periods
  std::vector<double> emissions;                // E^t
  std::optional<std::vector<double>> reference_emissions;  // E^t of the tax-free plan
  std::vector<std::vector<double>> levels;      // R_j^t, [j][t]
  std::vector<double> mean_emissions;           // eta_j
  std::vector<double> weights;                  // gamma_j, empty with a single technology
  std::vector<double> weighted;                 // sum_j gamma_j R_j^t
  std::vector<double> betas;
  std::vector<std::optional<int>> tau;          // per beta
  double final_level = 0.0;                     // weighted level in the last reported period
};

/// Measures over the first horizon.periods periods of the plan. `reference` is an
/// optional tax-free plan of the same instance for the emission comparison.
inline EffectivenessReport evaluate(const Plan& plan, const Instance& in, const std::vector<double>& betas,
                                    const Plan* reference = nullptr) {
  EffectivenessReport r;
  r.periods = std::min(in.horizon.periods, plan.periods());
  const auto T = static_cast<std::size_t>(r.periods);
  auto cut = [T](std::vector<double> v) {
    v.resize(T);
    return v;
  };
  r.emissions = cut(emissions_by_period(plan, in));
  if (reference) r.reference_emissions = cut(emissions_by_period(*reference, in));
  r.levels = transition_levels(plan, in);
  for (auto& row : r.levels) row.resize(T);
  r.mean_emissions = mean_technology_emissions(in);
  r.betas = betas;
  if (in.technologies.size() >= 2) {
    r.weights = technology_weights(r.mean_emissions);
    r.weighted = weighted_levels(r.levels, r.weights);
    for (double b : betas) r.tau.push_back(transition_period(r.weighted, b));
    r.final_level = r.weighted.empty() ? 0.0 : r.weighted.back();
  } else {
    r.tau.assign(betas.size(), std::nullopt);
  }
  return r;
}

}  // namespace captrans
