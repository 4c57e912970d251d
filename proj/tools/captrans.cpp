// captrans command-line tool: solve, evaluate, sweep and solver file interchange.
//
// Exit codes: 0 ok, 1 usage, 2 invalid input, 3 solver failure, 4 I/O failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "captrans/effectiveness.hpp"
#include "captrans/instance_io.hpp"
#include "captrans/lp_format.hpp"
#include "captrans/model.hpp"
#include "captrans/reporting.hpp"
#include "captrans/scenario.hpp"
#include "captrans/solver.hpp"

namespace fs = std::filesystem;
using namespace captrans;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInvalid = 2, kSolver = 3, kIo = 4 };

struct Options {
  double gap = 1e-4;
  double time_limit = 36000.0;
  long node_limit = 0;
  std::uint64_t seed = 0;
  std::vector<double> betas{0.5, 0.75};
  std::string variant = "spt";
  std::string out;
  int jobs = 0;
};

Variant parse_variant(const std::string& v) { return v == "spwt" ? Variant::SPWT : Variant::SPT; }

SolverConfig solver_config(const Options& o) {
  SolverConfig cfg;
  cfg.relative_gap = o.gap;
  cfg.time_limit_seconds = o.time_limit;
  if (o.node_limit > 0) cfg.node_limit = o.node_limit;
  cfg.seed = o.seed;
  return cfg;
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path)) throw IoError("no such file: " + path);
}

// plan.json: the solver outcome plus every column value by name.
Json plan_json(const PlanningModel& pm, const std::vector<double>& x, const MilpResult* res) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["variant"] = to_string(pm.variant);
  if (res) {
    j["status"] = to_string(res->status);
    j["objective"] = res->objective;
    j["best_bound"] = res->best_bound;
    j["gap"] = res->gap;
    j["nodes"] = res->nodes;
  } else {
    j["status"] = "imported";
    j["objective"] = pm.milp.objective(x);
  }
  Json values = Json::object();
  for (std::size_t c = 0; c < x.size(); ++c) values[pm.milp.var(static_cast<int>(c)).name] = x[c];
  j["values"] = values;
  return j;
}

struct LoadedPlan {
  Variant variant;
  Plan plan;
};

LoadedPlan load_plan(const std::string& path, const Instance& in) {
  require_file(path);
  const auto j = parse_json_text(read_text_file(path), path);
  if (!j.is_object() || !j.contains("values") || !j["values"].is_object())
    throw ParseError(path + ": plan file needs a values object");
  const auto variant_name = j.value("variant", std::string("spt"));
  if (variant_name != "spt" && variant_name != "spwt") throw ParseError(path + ": unknown variant " + variant_name);
  const auto pm = build(in, parse_variant(variant_name));
  std::vector<double> x(pm.milp.num_vars(), 0.0);
  std::vector<char> seen(x.size(), 0);
  for (const auto& [name, value] : j["values"].items()) {
    const int c = pm.milp.find(name);
    if (c < 0) throw ParseError(path + ": unknown variable " + name);
    if (!value.is_number()) throw ParseError(path + ": value of " + name + " is not a number");
    x[static_cast<std::size_t>(c)] = value.get<double>();
    seen[static_cast<std::size_t>(c)] = 1;
  }
  for (std::size_t c = 0; c < seen.size(); ++c)
    if (!seen[c]) throw ParseError(path + ": plan is missing " + pm.milp.var(static_cast<int>(c)).name);
  return {pm.variant, decode(pm, x)};
}

Json common_config(const std::string& command, const Options& o) {
  return {{"command", command}, {"variant", o.variant}, {"gap", o.gap},     {"time_limit", o.time_limit},
          {"seed", o.seed},     {"betas", o.betas},     {"node_limit", o.node_limit}};
}

void add_plan_tables(ReportBundle& b, const Plan& plan, const Instance& in, const std::vector<double>& betas,
                     const Plan* reference) {
  const auto rep = evaluate(plan, in, betas, reference);
  b.tables.emplace_back("plan.csv", plan_table(plan, in));
  b.tables.emplace_back("production.csv", production_table(plan, in));
  b.tables.emplace_back("inventory.csv", inventory_table(plan, in));
  b.tables.emplace_back("costs.csv", cost_table(plan));
  b.tables.emplace_back("levels.csv", levels_table(rep, in));
  b.tables.emplace_back("emissions.csv", emissions_table(rep));
  b.tables.emplace_back("measures.csv", measures_table(rep, in));
}

void print_measures(const Plan& plan, const Instance& in, const std::vector<double>& betas) {
  const auto rep = evaluate(plan, in, betas);
  if (rep.weights.empty()) return;
  std::printf("final weighted level %.6g\n", rep.final_level);
  for (std::size_t b = 0; b < betas.size(); ++b)
    std::printf("tau(%.3g) = %s\n", betas[b], tau_text(rep.tau[b]).c_str());
}

int cmd_solve(const std::string& instance_path, const Options& o, bool compare) {
  require_file(instance_path);
  const auto in = load_instance(instance_path);
  const auto pm = build(in, parse_variant(o.variant));
  std::printf("%s: %zu columns (%zu binary), %zu rows\n", to_string(pm.variant).c_str(), pm.milp.num_vars(),
              pm.milp.binary_count(), pm.milp.num_rows());
  const auto res = solve_milp(pm.milp, solver_config(o));
  std::printf("status %s, nodes %ld, %.1f s\n", to_string(res.status).c_str(), res.nodes, res.seconds);
  if (!res.incumbent) {
    std::fprintf(stderr, "error: no feasible plan found (%s)\n", to_string(res.status).c_str());
    return kSolver;
  }
  std::printf("objective %.10g, bound %.10g, gap %.3g\n", res.objective, res.best_bound, res.gap);
  const Plan plan = decode(pm, *res.incumbent);

  std::optional<Plan> reference;
  if (compare) {
    const auto rpm = build(in, Variant::SPWT);
    const auto rres = solve_milp(rpm.milp, solver_config(o));
    if (!rres.incumbent) {
      std::fprintf(stderr, "error: no feasible tax-free plan found (%s)\n", to_string(rres.status).c_str());
      return kSolver;
    }
    std::printf("tax-free objective %.10g (%s)\n", rres.objective, to_string(rres.status).c_str());
    reference = decode(rpm, *rres.incumbent);
  }

  const fs::path out = o.out.empty() ? fs::path("captrans_out") : fs::path(o.out);
  fs::create_directories(out);
  write_text_file(out / "plan.json", plan_json(pm, *res.incumbent, &res).dump(2) + "\n");
  ReportBundle b;
  b.seed = o.seed;
  b.config = common_config("solve", o);
  b.config["instance"] = instance_path;
  b.config["compare"] = compare;
  add_plan_tables(b, plan, in, o.betas, reference ? &*reference : nullptr);
  write_reports(b, out);
  print_measures(plan, in, o.betas);
  std::printf("wrote %s\n", out.string().c_str());
  return kOk;
}

int cmd_evaluate(const std::string& instance_path, const std::string& plan_path, const std::string& reference_path,
                 const Options& o) {
  require_file(instance_path);
  const auto in = load_instance(instance_path);
  const auto lp = load_plan(plan_path, in);
  std::optional<Plan> reference;
  if (!reference_path.empty()) reference = load_plan(reference_path, in).plan;
  const fs::path out = o.out.empty() ? fs::path("captrans_eval") : fs::path(o.out);
  ReportBundle b;
  b.seed = o.seed;
  b.config = common_config("evaluate", o);
  b.config["instance"] = instance_path;
  b.config["plan"] = plan_path;
  b.config["reference"] = reference_path;
  add_plan_tables(b, lp.plan, in, o.betas, reference ? &*reference : nullptr);
  write_reports(b, out);
  std::printf("%s plan, objective %.10g\n", to_string(lp.variant).c_str(), lp.plan.objective);
  print_measures(lp.plan, in, o.betas);
  std::printf("wrote %s\n", out.string().c_str());
  return kOk;
}

// A sweep spec is an instance document (or just the sweep section, which then
// uses the built-in example) with a `sweep` object.
SweepSpec load_sweep_spec(const std::string& path) {
  require_file(path);
  const auto j = parse_json_text(read_text_file(path), path);
  if (!j.is_object() || !j.contains("sweep") || !j["sweep"].is_object())
    throw ParseError(path + ": sweep spec needs a sweep object");
  SweepSpec spec;
  spec.base = j.contains("machines") ? instance_from_json(j) : builtin_example();
  const auto& s = j["sweep"];
  using detail::field_or;
  spec.instances = field_or<int>(s, "sweep", "instances", spec.instances);
  spec.ep_ratios = field_or<std::vector<double>>(s, "sweep", "ep_ratios", spec.ep_ratios);
  spec.ci_ratios = field_or<std::vector<double>>(s, "sweep", "ci_ratios", spec.ci_ratios);
  spec.betas = field_or<std::vector<double>>(s, "sweep", "betas", spec.betas);
  spec.seed = field_or<std::uint64_t>(s, "sweep", "seed", spec.seed);
  spec.solver.relative_gap = field_or<double>(s, "sweep", "gap", spec.solver.relative_gap);
  spec.solver.time_limit_seconds = field_or<double>(s, "sweep", "time_limit", spec.solver.time_limit_seconds);
  spec.simplified = field_or<bool>(s, "sweep", "simplified", spec.simplified);
  std::vector<std::string> bad;
  if (spec.instances < 0) bad.push_back("sweep.instances must be non-negative");
  for (double b : spec.betas)
    if (!(b >= 0.0 && b <= 1.0)) bad.push_back("sweep.betas must lie in [0,1]");
  for (double r : spec.ep_ratios)
    if (!(r > 0.0 && r < 1.0)) bad.push_back("sweep.ep_ratios must lie in (0,1)");
  for (double r : spec.ci_ratios)
    if (!(r > 1.0)) bad.push_back("sweep.ci_ratios must exceed 1");
  if (!(spec.solver.relative_gap >= 0.0)) bad.push_back("sweep.gap must be non-negative");
  if (!(spec.solver.time_limit_seconds > 0.0)) bad.push_back("sweep.time_limit must be positive");
  if (!bad.empty()) throw ValidationError(bad);
  return spec;
}

int cmd_sweep(const std::string& spec_path, const CLI::App& sub, Options o, std::optional<int> instances,
              bool full_model) {
  SweepSpec spec = load_sweep_spec(spec_path);
  if (sub.count("--seed")) spec.seed = o.seed;
  if (sub.count("--gap")) spec.solver.relative_gap = o.gap;
  if (sub.count("--time-limit")) spec.solver.time_limit_seconds = o.time_limit;
  if (sub.count("--beta")) spec.betas = o.betas;
  if (instances) spec.instances = *instances;
  if (full_model) spec.simplified = false;
  spec.jobs = o.jobs;
  o.seed = spec.seed;

  std::printf("sweep: %d instances x %zu cells, seed %llu, %d worker(s)\n", spec.instances,
              spec.ep_ratios.size() * spec.ci_ratios.size(), static_cast<unsigned long long>(spec.seed), spec.jobs);
  const auto res = run_sweep(spec);
  const auto cells = summarize(res);
  int failed = 0;
  for (const auto& r : res.scenarios)
    if (!r.solved()) ++failed;

  const fs::path out = o.out.empty() ? fs::path("captrans_sweep") : fs::path(o.out);
  ReportBundle b;
  b.seed = spec.seed;
  b.config = {{"command", "sweep"},
              {"spec", spec_path},
              {"instances", spec.instances},
              {"ep_ratios", spec.ep_ratios},
              {"ci_ratios", spec.ci_ratios},
              {"betas", spec.betas},
              {"gap", spec.solver.relative_gap},
              {"time_limit", spec.solver.time_limit_seconds},
              {"simplified", spec.simplified}};
  b.tables.emplace_back("scenarios.csv", scenario_table(res));
  b.tables.emplace_back("sweep.csv", sweep_table(cells));
  b.tables.emplace_back("tau.csv", tau_table(cells));
  write_reports(b, out);
  for (const auto& c : cells)
    std::printf("ep %.2g ci %.2g: solved %d/%d  P(R=0) %.2f  P(R>=.5) %.2f  P(R>=.75) %.2f  P(R=1) %.2f  E(R) %.3f\n",
                c.ep_ratio, c.ci_ratio, c.solved, c.total, c.p_zero, c.p_half, c.p_three_quarters, c.p_one,
                c.expectation);
  if (failed) std::fprintf(stderr, "warning: %d scenario(s) without a solution\n", failed);
  std::printf("wrote %s\n", out.string().c_str());
  return kOk;
}

int cmd_export(const std::string& instance_path, const Options& o) {
  require_file(instance_path);
  const auto in = load_instance(instance_path);
  const auto pm = build(in, parse_variant(o.variant));
  const fs::path out = o.out.empty() ? fs::path("model.lp") : fs::path(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  export_lp_file(pm.milp, out);
  std::printf("wrote %s (%zu columns, %zu binary, %zu rows)\n", out.string().c_str(), pm.milp.num_vars(),
              pm.milp.binary_count(), pm.milp.num_rows());
  return kOk;
}

int cmd_import(const std::string& instance_path, const std::string& solution_path, const Options& o) {
  require_file(instance_path);
  require_file(solution_path);
  const auto in = load_instance(instance_path);
  const auto pm = build(in, parse_variant(o.variant));
  const auto x = parse_solution_text(read_text_file(solution_path), pm.milp);
  const Plan plan = decode(pm, x);
  const fs::path out = o.out.empty() ? fs::path("captrans_import") : fs::path(o.out);
  fs::create_directories(out);
  write_text_file(out / "plan.json", plan_json(pm, x, nullptr).dump(2) + "\n");
  ReportBundle b;
  b.seed = o.seed;
  b.config = common_config("import-sol", o);
  b.config["instance"] = instance_path;
  b.config["solution"] = solution_path;
  add_plan_tables(b, plan, in, o.betas, nullptr);
  write_reports(b, out);
  std::printf("imported %s plan, objective %.10g\n", to_string(pm.variant).c_str(), plan.objective);
  print_measures(plan, in, o.betas);
  std::printf("wrote %s\n", out.string().c_str());
  return kOk;
}

int cmd_example(const ExampleOptions& ex, const Options& o) {
  const auto in = builtin_example(ex);
  const fs::path out = o.out.empty() ? fs::path("example.json") : fs::path(o.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  save_instance(in, out);
  std::printf("wrote %s (%zu machines, %zu items, %d periods)\n", out.string().c_str(), in.machine_count(),
              in.item_count(), in.periods());
  return kOk;
}

int default_jobs() {
  if (const char* env = std::getenv("CAPTRANS_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
    std::fprintf(stderr, "warning: ignoring CAPTRANS_JOBS=%s\n", env);
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clean-technology capacity transition planning"};
  app.require_subcommand(1);
  Options o;
  o.jobs = default_jobs();

  auto solver_flags = [&o](CLI::App* c) {
    c->add_option("--gap", o.gap, "relative optimality gap")->capture_default_str()->check(CLI::NonNegativeNumber);
    c->add_option("--time-limit", o.time_limit, "time limit in seconds")->capture_default_str()->check(CLI::PositiveNumber);
    c->add_option("--seed", o.seed, "seed for every random choice")->capture_default_str();
    c->add_option("--node-limit", o.node_limit, "branch-and-bound node limit (0 = none)")->check(CLI::NonNegativeNumber);
  };
  auto beta_flag = [&o](CLI::App* c) {
    c->add_option("--beta", o.betas, "transition threshold, repeatable")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  };
  auto variant_flag = [&o](CLI::App* c) {
    c->add_option("--variant", o.variant, "spt (with tax) or spwt (without)")
        ->check(CLI::IsMember({"spt", "spwt"}))
        ->capture_default_str();
  };

  std::string instance, plan, reference, solution, spec;
  bool compare = false;

  auto* solve = app.add_subcommand("solve", "solve an instance and write the plan and reports");
  solve->add_option("instance", instance, "instance file")->required();
  solver_flags(solve);
  beta_flag(solve);
  variant_flag(solve);
  solve->add_flag("--compare", compare, "also solve the tax-free model for the emission comparison");
  solve->add_option("--out", o.out, "output directory");

  auto* eval = app.add_subcommand("evaluate", "effectiveness report for a plan file");
  eval->add_option("instance", instance, "instance file")->required();
  eval->add_option("plan", plan, "plan.json written by solve or import-sol")->required();
  eval->add_option("--reference", reference, "tax-free plan for the emission comparison");
  eval->add_option("--seed", o.seed, "recorded in the manifest");
  beta_flag(eval);
  eval->add_option("--out", o.out, "output directory");

  std::optional<int> instances;
  bool full_model = false;
  auto* sweep = app.add_subcommand("sweep", "run a seeded scenario sweep");
  sweep->add_option("spec", spec, "sweep spec file")->required();
  solver_flags(sweep);
  beta_flag(sweep);
  sweep->add_option("--instances", instances, "number of sampled instances")->check(CLI::NonNegativeNumber);
  sweep->add_flag("--full-model", full_model, "keep items, maintenance and shifts instead of the simplified model");
  sweep->add_option("--jobs", o.jobs, "worker threads (default CAPTRANS_JOBS or 1)")->check(CLI::Range(1, 1024));
  sweep->add_option("--out", o.out, "output directory");

  auto* exp = app.add_subcommand("export-lp", "write the model in LP format");
  exp->add_option("instance", instance, "instance file")->required();
  variant_flag(exp);
  exp->add_option("--out", o.out, "LP file");

  auto* imp = app.add_subcommand("import-sol", "read an external `name value` solution");
  imp->add_option("instance", instance, "instance file")->required();
  imp->add_option("solution", solution, "solution file")->required();
  variant_flag(imp);
  beta_flag(imp);
  imp->add_option("--out", o.out, "output directory");

  ExampleOptions ex;
  bool no_tax = false, no_maintenance = false, single_shift = false;
  auto* example = app.add_subcommand("example", "write the built-in appendix instance");
  example->add_option("--periods", ex.periods, "reported periods")->capture_default_str();
  example->add_option("--simulated", ex.simulated_periods, "simulated periods")->capture_default_str();
  example->add_option("--candidates", ex.candidates_per_technology, "candidate machines per technology (0 = derived)")
      ->capture_default_str();
  example->add_option("--clean-ratio", ex.clean_emission_ratio, "clean emissions as a fraction of dirty")
      ->capture_default_str();
  example->add_flag("--no-tax", no_tax, "zero carbon tax");
  example->add_flag("--no-maintenance", no_maintenance, "drop preventive maintenance");
  example->add_flag("--single-shift", single_shift, "pin one work shift");
  example->add_option("--out", o.out, "instance file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(instance, o, compare);
    if (*eval) return cmd_evaluate(instance, plan, reference, o);
    if (*sweep) return cmd_sweep(spec, *sweep, o, instances, full_model);
    if (*exp) return cmd_export(instance, o);
    if (*imp) return cmd_import(instance, solution, o);
    if (*example) {
      ex.carbon_tax = !no_tax;
      ex.model.maintenance = !no_maintenance;
      ex.model.single_shift = single_shift;
      return cmd_example(ex, o);
    }
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return kIo;
  } catch (const SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return kSolver;
  } catch (const Error& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kInvalid;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kSolver;
  }
  return kUsage;
}
