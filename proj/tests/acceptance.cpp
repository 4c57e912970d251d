// Acceptance run: one PASS/FAIL line per criterion on stdout, progress on stderr.
//
// Suites: (1) seeded tiny instances against the enumeration oracle, (3) the
// tax-free baseline, (4) the appendix instance with and without tax (reduced
// scale built in, full scale through --external), (6) a seeded mini-sweep.
// Criteria 7 and 8 are checked over every plan above.
//
// Exit status is 0 when every criterion outside --expect-fail passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "captrans/effectiveness.hpp"
#include "captrans/lp_format.hpp"
#include "captrans/model.hpp"
#include "captrans/scenario.hpp"
#include "captrans/solver.hpp"
#include "tiny.hpp"

using namespace captrans;

namespace {

struct Verdict {
  int id;
  bool pass;
  std::string text;
};

struct SolvedPlan {
  std::string origin;
  Instance instance;
  Plan plan;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double now() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

void progress(const std::string& s) { std::fprintf(stderr, "# %s\n", s.c_str()); }

// The instance used for suites 3 to 5: 6 simulated periods, 4 reported, 3 candidates per technology.
ExampleOptions reduced_example() {
  ExampleOptions ex;
  ex.periods = 4;
  ex.simulated_periods = 6;
  ex.candidates_per_technology = 3;
  return ex;
}

struct Solve {
  MilpResult res;
  std::optional<Plan> plan;
};

Solve solve(const Instance& in, Variant v, const SolverConfig& cfg) {
  const auto pm = build(in, v);
  Solve s{solve_milp(pm.milp, cfg), std::nullopt};
  if (s.res.incumbent) s.plan = decode(pm, *s.res.incumbent);
  return s;
}

std::vector<double> clean_share(const Plan& p, const Instance& in) {
  auto rep = evaluate(p, in, {});
  return rep.levels.at(1);
}

std::string series(const std::vector<double>& v) {
  std::ostringstream o;
  o << '(';
  for (std::size_t i = 0; i < v.size(); ++i) o << (i ? " " : "") << fmt("%.3g", v[i]);
  o << ')';
  return o.str();
}

struct Pattern {
  bool ok = false;
  std::string text;
};

// Clean share 0 in the first period, strictly rising to 1 at some 3 <= t* <= |T|, then 1.
Pattern transition_pattern(const Plan& plan, const Instance& in) {
  const auto R = clean_share(plan, in);
  const int T = static_cast<int>(R.size());
  std::optional<int> tstar;
  for (int t = 0; t < T && !tstar; ++t)
    if (std::abs(R[static_cast<std::size_t>(t)] - 1.0) <= 1e-9) tstar = t + 1;
  bool ok = std::abs(R[0]) <= 1e-9 && tstar && *tstar >= 3 && *tstar <= T;
  if (ok) {
    for (int t = 1; t < *tstar; ++t)
      if (!(R[static_cast<std::size_t>(t)] > R[static_cast<std::size_t>(t - 1)] + 1e-9)) ok = false;
    for (int t = *tstar; t < T; ++t)
      if (std::abs(R[static_cast<std::size_t>(t)] - 1.0) > 1e-9) ok = false;
  }
  return {ok, "R_clean " + series(R) + ", full transition at " + (tstar ? std::to_string(*tstar) : std::string("never"))};
}

// SPT emissions at most SPWT from the first clean-production period on; SPWT non-decreasing.
Pattern decoupling(const Plan& spt, const Plan& spwt, const Instance& in) {
  const auto a = evaluate(spt, in, {}, &spwt);
  const auto& e_spt = a.emissions;
  const auto& e_spwt = *a.reference_emissions;
  std::optional<int> first_clean;
  for (int t = 0; t < a.periods && !first_clean; ++t)
    for (auto k : in.technologies[1].machines)
      for (const auto& item : spt.production)
        if (item[k][static_cast<std::size_t>(t)] > 0.0) first_clean = t;
  bool below = true, rising = true;
  std::string where;
  if (first_clean)
    for (int t = *first_clean; t < a.periods; ++t) {
      const auto ut = static_cast<std::size_t>(t);
      if (e_spt[ut] > e_spwt[ut] * (1.0 + 1e-9)) {
        if (below) where = ", SPT above SPWT at t=" + std::to_string(t + 1);
        below = false;
      }
    }
  for (int t = 1; t < a.periods; ++t)
    if (e_spwt[static_cast<std::size_t>(t)] < e_spwt[static_cast<std::size_t>(t - 1)] * (1.0 - 1e-9)) {
      if (rising) where += ", SPWT falls at t=" + std::to_string(t + 1);
      rising = false;
    }
  return {below && rising, "E_SPT " + series(e_spt) + " vs E_SPWT " + series(e_spwt) + ", first clean period " +
                               (first_clean ? std::to_string(*first_clean + 1) : std::string("none")) + where};
}

// Exports the model, runs `command <lp> <solution> --gap 1e-3 --quiet` and decodes the result.
// The solution header must report an optimal (within-gap) status.
std::optional<Plan> external_solve(const Instance& in, Variant v, const std::string& command, std::string& note) {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path() / "captrans_acceptance";
  fs::create_directories(dir);
  const auto pm = build(in, v);
  const auto lp = dir / (to_string(v) + ".lp");
  const auto sol = dir / (to_string(v) + ".sol");
  fs::remove(sol);
  try {
    export_lp_file(pm.milp, lp);
    const std::string cmd = command + " '" + lp.string() + "' '" + sol.string() + "' --gap 1e-3 --quiet > '" +
                            (dir / (to_string(v) + ".log")).string() + "' 2>&1";
    if (std::system(cmd.c_str()) != 0 || !fs::exists(sol)) {
      note = "external solver failed on " + to_string(v);
      return std::nullopt;
    }
    const auto text = read_text_file(sol);
    if (text.rfind("# HiGHS Optimal", 0) != 0) {
      note = to_string(v) + " not solved to the gap";
      return std::nullopt;
    }
    return decode(pm, parse_solution_text(text, pm.milp));
  } catch (const std::exception& e) {
    note = to_string(v) + ": " + e.what();
    return std::nullopt;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"captrans acceptance criteria"};
  std::vector<int> expect_fail;
  int sweep_instances = 10;
  std::uint64_t sweep_seed = 1;
  int tiny_count = 60;
  std::string external;
  app.add_option("--expect-fail", expect_fail, "criteria known to be unattainable");
  app.add_option("--sweep-instances", sweep_instances, "instances in the mini-sweep")->capture_default_str();
  app.add_option("--sweep-seed", sweep_seed, "sweep seed")->capture_default_str();
  app.add_option("--tiny", tiny_count, "tiny oracle instances")->capture_default_str()->check(CLI::Range(50, 10000));
  app.add_option("--external", external, "external solver command for the full-scale appendix path");
  CLI11_PARSE(app, argc, argv);

  std::vector<Verdict> verdicts;
  std::vector<SolvedPlan> plans;
  std::vector<std::string> relaxation_breaks;
  int relaxation_pairs = 0;
  auto check_relaxation = [&](const std::string& origin, const Solve& spt, const Solve& spwt) {
    if (!spt.res.incumbent || !spwt.res.incumbent) return;
    ++relaxation_pairs;
    if (!(spwt.res.objective <= spt.res.objective + 1e-9))
      relaxation_breaks.push_back(origin + fmt(" SPWT exceeds SPT by %.3g", spwt.res.objective - spt.res.objective));
  };

  // ---- Suite 1: tiny instances against the oracle.
  {
    const double t0 = now();
    int compared = 0, agree = 0;
    double worst = 0.0;
    std::string first_bad;
    for (int seed = 1; seed <= tiny_count; ++seed) {
      const auto in = fixtures::tiny_instance(static_cast<std::uint64_t>(seed));
      const auto pm = build(in, Variant::SPT);
      SolverConfig exact;
      exact.relative_gap = 1e-9;
      const auto bb = solve_milp(pm.milp, exact);
      const auto oracle = brute_force_oracle(pm.milp);
      ++compared;
      const bool both_inf = !bb.incumbent && !oracle.incumbent;
      bool ok = both_inf;
      if (bb.incumbent && oracle.incumbent) {
        const double rel = std::abs(bb.objective - oracle.objective) / std::max(1.0, std::abs(oracle.objective));
        worst = std::max(worst, rel);
        ok = rel <= 1e-6;
      }
      if (ok) ++agree;
      else if (first_bad.empty()) first_bad = "seed " + std::to_string(seed);
      if (bb.incumbent) plans.push_back({"tiny " + std::to_string(seed) + " spt", in, decode(pm, *bb.incumbent)});

      const auto spwt = solve(in, Variant::SPWT, exact);
      if (spwt.plan) plans.push_back({"tiny " + std::to_string(seed) + " spwt", in, *spwt.plan});
      Solve spt_s{bb, std::nullopt};
      check_relaxation("tiny " + std::to_string(seed), spt_s, spwt);
    }
    const double secs = now() - t0;
    std::ostringstream o;
    o << agree << "/" << compared << " tiny instances agree with the oracle, max relative difference "
      << fmt("%.2g", worst) << fmt(", %.1f s", secs);
    if (!first_bad.empty()) o << ", first mismatch " << first_bad;
    verdicts.push_back({1, agree == compared && compared >= 50 && secs < 120.0, o.str()});
    progress("suite 1 done" + fmt(" in %.1f s", secs));
  }

  SolverConfig desk;
  desk.relative_gap = 1e-3;
  desk.time_limit_seconds = 1800.0;

  // ---- Suite 3: tax-free baseline.
  {
    const double t0 = now();
    auto ex = reduced_example();
    ex.carbon_tax = false;
    const auto in = builtin_example(ex);
    const auto s = solve(in, Variant::SPT, desk);
    bool ok = false;
    std::string text = "no plan (" + to_string(s.res.status) + ")";
    if (s.plan) {
      plans.push_back({"tax-free baseline", in, *s.plan});
      const auto rep = evaluate(*s.plan, in, {});
      ok = true;
      for (int t = 0; t < rep.periods; ++t) {
        double made = 0.0;
        for (const auto& item : s.plan->production)
          for (const auto& mk : item) made += mk[static_cast<std::size_t>(t)];
        if (made > 0.0 && std::abs(rep.levels[0][static_cast<std::size_t>(t)] - 1.0) > 1e-9) ok = false;
      }
      text = "R_dirty by period " + series(rep.levels[0]) + ", clean CI " +
             fmt("%.3g", in.costs.investment[in.technologies[1].machines[0]] /
                              in.costs.investment[in.technologies[0].machines[0]]) +
             "x dirty, " + to_string(s.res.status);
    }
    verdicts.push_back({3, ok, text + fmt(", %.1f s", now() - t0)});
    progress("suite 3 done" + fmt(" in %.1f s", now() - t0));
  }

  // ---- Suite 4: the appendix instance with and without tax. Built-in solver at
  // reduced scale always; full scale through the LP file when an external solver is given.
  {
    const double t0 = now();
    struct Path {
      std::string label;
      std::optional<Pattern> pattern;
      std::optional<Pattern> decoupling;
    };
    std::vector<Path> paths;

    const auto in = builtin_example(reduced_example());
    const auto spt = solve(in, Variant::SPT, desk);
    progress("suite 4 SPT: " + to_string(spt.res.status) + fmt(" in %.1f s", now() - t0));
    const auto spwt = solve(in, Variant::SPWT, desk);
    progress("suite 4 SPWT: " + to_string(spwt.res.status) + fmt(" after %.1f s", now() - t0));
    check_relaxation("reduced appendix", spt, spwt);
    if (spt.plan) plans.push_back({"reduced appendix spt", in, *spt.plan});
    if (spwt.plan) plans.push_back({"reduced appendix spwt", in, *spwt.plan});
    Path reduced{"reduced scale, built-in", std::nullopt, std::nullopt};
    if (spt.plan && spt.res.gap <= 1e-3) reduced.pattern = transition_pattern(*spt.plan, in);
    if (spt.plan && spwt.plan) reduced.decoupling = decoupling(*spt.plan, *spwt.plan, in);
    paths.push_back(reduced);

    if (!external.empty()) {
      const auto full = builtin_example();
      std::string note;
      const auto ext_spt = external_solve(full, Variant::SPT, external, note);
      const auto ext_spwt = external_solve(full, Variant::SPWT, external, note);
      progress("suite 4 full scale: " + (note.empty() ? std::string("solved") : note) + fmt(" after %.1f s", now() - t0));
      Path fp{"full scale, external", std::nullopt, std::nullopt};
      if (ext_spt) {
        plans.push_back({"full appendix spt (external)", full, *ext_spt});
        fp.pattern = transition_pattern(*ext_spt, full);
      }
      if (ext_spwt) plans.push_back({"full appendix spwt (external)", full, *ext_spwt});
      if (ext_spt && ext_spwt) {
        fp.decoupling = decoupling(*ext_spt, *ext_spwt, full);
        ++relaxation_pairs;
        if (!(ext_spwt->objective <= ext_spt->objective + 1e-9))
          relaxation_breaks.push_back("full appendix (external): SPWT exceeds SPT");
      }
      if (!note.empty()) fp.label += " (" + note + ")";
      paths.push_back(fp);
    }

    // Either path may establish a criterion; every path is reported.
    for (int id : {4, 5}) {
      bool any = false;
      std::string text;
      for (const auto& path : paths) {
        const auto& r = id == 4 ? path.pattern : path.decoupling;
        any = any || (r && r->ok);
        text += (text.empty() ? "" : "; ") + path.label + ": " +
                (r ? std::string(r->ok ? "holds, " : "fails, ") + r->text : std::string("no plan within gap 1e-3"));
      }
      verdicts.push_back({id, any, text});
    }
    progress("suite 4 done" + fmt(" in %.1f s", now() - t0));
  }

  // ---- Criterion 2 covers suites 1 and 4.
  verdicts.push_back({2, relaxation_breaks.empty() && relaxation_pairs > 0,
                      std::to_string(relaxation_pairs - static_cast<int>(relaxation_breaks.size())) + "/" +
                          std::to_string(relaxation_pairs) + " solved pairs with Z_SPWT <= Z_SPT + 1e-9" +
                          (relaxation_breaks.empty() ? "" : ", first break: " + relaxation_breaks.front())});

  // ---- Suite 6: seeded mini-sweep.
  {
    const double t0 = now();
    SweepSpec spec;
    spec.base = builtin_example();
    spec.instances = sweep_instances;
    spec.seed = sweep_seed;
    spec.keep_plans = true;
    const auto res = run_sweep(spec);
    for (const auto& r : res.scenarios)
      if (r.plan && r.instance)
        plans.push_back({"sweep instance " + std::to_string(r.scenario.instance + 1) + fmt(" ep %.2g", r.scenario.ep_ratio) +
                             fmt(" ci %.2g", r.scenario.ci_ratio),
                         *r.instance, *r.plan});
    for (const auto& r : res.scenarios)
      if (!r.solved())
        progress("sweep instance " + std::to_string(r.scenario.instance + 1) + fmt(" (xi %.3g", r.scenario.xi) +
                 fmt(", ep %.2g", r.scenario.ep_ratio) + fmt(", ci %.2g)", r.scenario.ci_ratio) + " unsolved: " +
                 (r.status ? to_string(*r.status) : r.error));
    const auto cells = summarize(res);
    std::map<std::pair<double, double>, CellSummary> by;
    int solved = 0;
    for (const auto& c : cells) {
      by[{c.ep_ratio, c.ci_ratio}] = c;
      solved += c.solved;
    }
    const double tol = 1e-12;
    bool a = true, b = true;
    for (double ep : spec.ep_ratios)
      for (std::size_t i = 1; i < spec.ci_ratios.size(); ++i)
        if (by[{ep, spec.ci_ratios[i]}].expectation > by[{ep, spec.ci_ratios[i - 1]}].expectation + tol) a = false;
    for (double ci : spec.ci_ratios)
      if (by[{0.5, ci}].expectation + tol < by[{0.7, ci}].expectation) b = false;
    double pmax = 0.0;
    for (const auto& c : cells) pmax = std::max(pmax, c.p_zero);
    const double p_corner = by[{0.7, 1.6}].p_zero;
    const bool c = p_corner >= pmax - tol;
    std::set<double> expectations, zeros;
    for (const auto& cell : cells) {
      expectations.insert(cell.expectation);
      zeros.insert(cell.p_zero);
    }
    std::ostringstream o;
    o << "(a) " << (a ? "yes" : "no") << " (b) " << (b ? "yes" : "no") << " (c) " << (c ? "yes" : "no") << "; "
      << solved << "/" << res.scenarios.size() << " scenarios solved, E(R) per cell";
    for (const auto& cell : cells) o << fmt(" %.3g", cell.expectation);
    o << fmt(", P(R=0) at (0.7,1.6) %.3g", p_corner) << fmt(" vs max %.3g", pmax);
    if (expectations.size() == 1 && zeros.size() == 1) o << " [every cell identical: orderings hold only as ties]";
    o << fmt(", %.0f s", now() - t0);
    verdicts.push_back({6, a && b && c && solved > 0, o.str()});
    progress("suite 6 done" + fmt(" in %.1f s", now() - t0));
  }

  // ---- Criterion 7: decoded-plan invariants everywhere.
  {
    std::size_t bad = 0;
    std::string first;
    for (const auto& p : plans) {
      const auto v = plan_violations(p.plan, p.instance);
      if (!v.empty()) {
        ++bad;
        if (first.empty()) first = p.origin + ": " + v.front();
      }
    }
    verdicts.push_back({7, bad == 0 && !plans.empty(),
                        std::to_string(plans.size() - bad) + "/" + std::to_string(plans.size()) +
                            " plans pass every model invariant" + (first.empty() ? "" : ", first failure " + first)});
  }

  // ---- Criterion 8: measure properties over every plan with at least two technologies.
  {
    std::size_t checked = 0, bad = 0;
    std::string first;
    for (const auto& p : plans) {
      if (p.instance.technologies.size() < 2) continue;
      std::vector<double> betas;
      for (int b = 0; b <= 20; ++b) betas.push_back(b / 20.0);
      EffectivenessReport rep;
      try {
        rep = evaluate(p.plan, p.instance, betas);
      } catch (const DegenerateWeightsError&) {
        continue;   // equal mean emissions: no weighting defined
      }
      ++checked;
      std::string why;
      double gsum = 0.0;
      for (double g : rep.weights) gsum += g;
      if (std::abs(gsum - 1.0) > 1e-12) why = "weights sum to " + fmt("%.17g", gsum);
      if (rep.weights[dirtiest_technology(p.instance)] != 0.0) why = "dirtiest technology has a non-zero weight";
      std::optional<int> prev = 1;
      for (std::size_t b = 0; b < betas.size(); ++b) {
        const auto& tau = rep.tau[b];
        if (tau && rep.weighted[static_cast<std::size_t>(*tau - 1)] < betas[b]) why = "level below beta at tau";
        if (tau && (!prev || *tau < *prev)) why = "tau decreases in beta";
        prev = tau;
      }
      if (!why.empty()) {
        ++bad;
        if (first.empty()) first = p.origin + ": " + why;
      }
    }
    verdicts.push_back({8, bad == 0 && checked > 0,
                        std::to_string(checked - bad) + "/" + std::to_string(checked) +
                            " two-technology plans satisfy the tau and weight properties" +
                            (first.empty() ? "" : ", first failure " + first)});
  }

  std::sort(verdicts.begin(), verdicts.end(), [](const Verdict& a, const Verdict& b) { return a.id < b.id; });
  int unexpected = 0;
  std::vector<int> red;
  for (const auto& v : verdicts) {
    const bool expected_red = std::find(expect_fail.begin(), expect_fail.end(), v.id) != expect_fail.end();
    std::printf("%s criterion %d: %s%s\n", v.pass ? "PASS" : "FAIL", v.id, v.text.c_str(),
                !v.pass && expected_red ? " [known unattainable]" : (v.pass && expected_red ? " [unexpected pass]" : ""));
    if (!v.pass) {
      red.push_back(v.id);
      if (!expected_red) ++unexpected;
    }
  }
  std::printf("%zu/%zu criteria pass", verdicts.size() - red.size(), verdicts.size());
  if (!red.empty()) {
    std::printf("; failing:");
    for (int id : red) std::printf(" %d", id);
  }
  std::printf("; %d unexpected failure(s)\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
