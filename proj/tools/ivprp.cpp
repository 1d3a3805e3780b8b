#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ivprp/bounds.hpp"
#include "ivprp/exact.hpp"
#include "ivprp/gen.hpp"
#include "ivprp/heuristic.hpp"
#include "ivprp/mip_model.hpp"
#include "ivprp/plan.hpp"
#include "ivprp/solver.hpp"

using namespace ivprp;

namespace {

enum Exit { Ok = 0, Usage = 1, Infeasible = 2, NoSolution = 3 };

struct Outcome {
  Json json;
  int code = Ok;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("cannot write " + path);
}

SolverConfig solver_config(const std::string& cmd, double time_limit, double gap) {
  SolverConfig cfg;
  if (!cmd.empty()) {
    cfg.command = cmd;
  } else if (auto env = solver_config_from_env()) {
    cfg = *env;
  } else {
    cfg.command = "python3 " IVPRP_TOOLS_DIR "/highs_solve.py {lp} {sol} {timelimit} {gap}";
  }
  cfg.time_limit = time_limit;
  cfg.gap = gap;
  check_config(cfg);
  return cfg;
}

/// Strategy, status, objective, (s, k, e), lower bound and gap.
Json run_report(const char* strategy, const std::string& status, const Instance& inst, const Plan* plan) {
  Json j{{"strategy", strategy}, {"status", status}};
  const LowerBoundResult lb = lower_bound_resources(inst);
  if (lb.bound)
    j["lower_bound"] = lb.bound->cost;
  else
    j["lower_bound_certificate"] = lb.certificate;
  if (plan) {
    const ResourceUsage u = plan_usage(*plan);
    const double cost = plan_cost(inst, *plan);
    j["objective"] = cost;
    j["usage"] = {{"days", u.days}, {"vehicles", u.vehicles}, {"pollsters", u.pollsters}};
    if (lb.bound && cost > 0) j["gap"] = (cost - lb.bound->cost) / cost;
    j["plan"] = to_json(*plan);
  }
  return j;
}

void summary(const Json& j, double secs) {
  std::fprintf(stderr, "%-14s %s\n", "strategy", j.value("strategy", "").c_str());
  std::fprintf(stderr, "%-14s %s\n", "status", j.value("status", "").c_str());
  if (j.contains("objective")) {
    const Json& u = j["usage"];
    std::fprintf(stderr, "%-14s %.2f\n", "objective", j["objective"].get<double>());
    std::fprintf(stderr, "%-14s (%d, %d, %d)\n", "(s, k, e)", u["days"].get<int>(), u["vehicles"].get<int>(),
                 u["pollsters"].get<int>());
  }
  if (j.contains("lower_bound")) std::fprintf(stderr, "%-14s %.2f\n", "lower bound", j["lower_bound"].get<double>());
  if (j.contains("gap")) std::fprintf(stderr, "%-14s %.1f%%\n", "gap", 100 * j["gap"].get<double>());
  std::fprintf(stderr, "%-14s %.2f s\n", "wall time", secs);
}

void subset_table(const HeuristicResult& r) {
  for (const Attempt& a : r.attempts) {
    std::fprintf(stderr, "k=%d  partition objective %.2f  subset sizes %d..%d%s\n", a.k, a.partition_objective,
                 a.min_size, a.max_size, a.feasible ? "" : "  (failed)");
    std::fprintf(stderr, "  %6s %5s %5s %5s %9s %9s  %s\n", "subset", "size", "k", "e", "cost", "arrival", "method");
    for (const SubsetReport& s : a.subsets) {
      if (s.feasible)
        std::fprintf(stderr, "  %6d %5d %5d %5d %9.2f %9s  %s\n", s.subset, s.size, s.vehicles, s.pollsters, s.cost,
                     s.last_arrival.str().c_str(), s.method.c_str());
      else
        std::fprintf(stderr, "  %6d %5d %5s %5s %9s %9s  %s\n", s.subset, s.size, "-", "-", "-", "-", s.reason.c_str());
    }
  }
  if (r.ok) {
    std::fprintf(stderr, "days (morning -> afternoon):");
    for (auto [a, b] : r.day_pairs) std::fprintf(stderr, " %d->%d", a, b);
    std::fprintf(stderr, "  [%s]\n", r.by_cost_order ? "cost order" : "matching");
  }
}

struct GenArgs {
  int n = 10;
  std::uint64_t seed = 1;
  int row = -1;
  std::optional<double> b_max, pause;
  std::optional<int> capacity;
  std::vector<int> resources;
  std::string out;
};

Outcome cmd_gen(const GenArgs& a) {
  GenParams p;
  if (a.row >= 0) {
    p = preset_params(a.row, a.seed);
  } else {
    p.n = a.n;
    p.seed = a.seed;
  }
  if (a.b_max) p.b_max = *a.b_max;
  if (a.pause) p.pause = *a.pause;
  if (a.capacity) p.capacity = *a.capacity;
  if (!a.resources.empty()) {
    if (a.resources.size() != 3) throw Error("--resources takes K E S");
    p.resources = std::array<int, 3>{a.resources[0], a.resources[1], a.resources[2]};
  }
  const Json inst = to_json(generate_instance(p));
  if (a.out.empty()) return {inst, Ok};
  write_text(a.out, inst.dump(2) + "\n");
  return {Json{{"written", a.out}, {"n", inst["n"]}}, Ok};
}

Outcome cmd_bounds(const std::string& path) {
  const Instance inst = load_instance(path);
  const ResourceBounds b = compute_bounds(inst);
  Json j = to_json(b);
  std::fprintf(stderr, "lower: %s\n", b.lower.bound ? "ok" : b.lower.certificate.c_str());
  if (b.upper)
    std::fprintf(stderr, "upper: (s, k, e) = (%d, %d, %d), objective %.2f\n", b.upper->counts.days,
                 b.upper->counts.vehicles, b.upper->counts.pollsters, b.upper->objective);
  return {j, b.lower.bound ? Ok : Infeasible};
}

struct SolveArgs {
  bool exact = false, mip = false, heuristic = false, fix = false;
  std::string instance, out, solver_cmd;
  std::uint64_t seed = 1;
  int threads = 1;
  std::optional<int> k_start;
  int nmax = 5000;
  double tmax = 60;
  double time_limit = 600;
  double gap = 1e-4;
  bool symmetry = false, cuts = false;
  std::int64_t node_budget = 0;
  double budget_secs = 0;
};

Outcome cmd_solve(const SolveArgs& a) {
  const int chosen = a.exact + a.mip + a.heuristic + a.fix;
  if (chosen != 1) throw CLI::ValidationError("choose exactly one of --exact, --mip, --heuristic, --fix-heuristic");
  const Instance inst = load_instance(a.instance);
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  const Plan* plan = nullptr;
  HeuristicResult hres;
  if (a.exact) {
    ExactLimits lim;
    if (a.node_budget > 0) lim.node_budget = a.node_budget;
    if (a.budget_secs > 0) lim.budget_secs = a.budget_secs;
    const ExactResult r = solve_exact(inst, lim);
    plan = r.plan ? &*r.plan : nullptr;
    o.json = run_report("exact", status_tag(r.status), inst, plan);
    o.json["search_nodes"] = r.nodes;
    o.code = plan ? Ok : r.status == ExactStatus::Infeasible ? Infeasible : NoSolution;
  } else if (a.mip) {
    ModelOptions mo;
    mo.symmetry_breaking = a.symmetry;
    mo.lower_bound_cuts = a.cuts;
    const MipModel m = build_model(inst, mo);
    const SolveResult r = solve_via_external(m, solver_config(a.solver_cmd, a.time_limit, a.gap));
    std::optional<Plan> p;
    if (r.status == SolveStatus::Optimal || r.status == SolveStatus::Feasible) {
      p = parse_solution(m, r.values);
      const FeasibilityReport rep = check_plan(inst, *p);
      if (!rep.ok) throw Error("solver solution fails the checker: " + rep.violations.front().detail);
      p->schedule = rep.schedule;
    }
    o.json = run_report("mip", status_tag(r.status), inst, p ? &*p : nullptr);
    if (r.gap) o.json["solver_gap"] = *r.gap;
    if (!r.warnings.empty()) o.json["warnings"] = r.warnings;
    o.code = p ? Ok : r.status == SolveStatus::Infeasible ? Infeasible : NoSolution;
  } else {
    HeuristicParams hp;
    hp.k_start = a.k_start;
    hp.n_max = a.nmax;
    hp.t_max_secs = a.tmax;
    hp.seed = a.seed;
    hp.threads = a.threads;
    std::optional<SolverConfig> subset_cfg;
    if (!a.solver_cmd.empty() || solver_config_from_env()) subset_cfg = solver_config(a.solver_cmd, a.tmax > 0 ? a.tmax : 1, a.gap);
    if (a.heuristic) {
      hres = run_three_phase(inst, hp, subset_cfg);
      o.json = to_json(hres);
      o.json["status"] = hres.ok ? "feasible" : "failed";
      o.code = hres.ok ? Ok : NoSolution;
      if (hres.ok) plan = &hres.plan;
      subset_table(hres);
    } else {
      const FixResult fr = fix_heuristic(inst, hp, solver_config(a.solver_cmd, a.time_limit, a.gap), subset_cfg);
      o.json = to_json(fr);
      o.json["status"] = fr.ok ? "feasible" : "failed";
      if (fr.base.lower_bound) o.json["lower_bound"] = *fr.base.lower_bound;
      o.code = fr.ok ? Ok : NoSolution;
      subset_table(fr.base);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  summary(o.json, secs);
  if (!a.out.empty() && o.json.contains("plan")) {
    write_text(a.out, o.json["plan"].dump(2) + "\n");
    o.json["plan_file"] = a.out;
  }
  return o;
}

Outcome cmd_check(const std::string& inst_path, const std::string& plan_path, bool no_breaks) {
  const Instance inst = load_instance(inst_path);
  const Plan plan = plan_from_json(read_json_file(plan_path));
  const FeasibilityReport rep = check_plan(inst, plan, CheckOptions{!no_breaks});
  Json j = report_to_json(rep);
  if (rep.ok) {
    const ResourceUsage u = plan_usage(plan);
    j["cost"] = plan_cost(inst, plan);
    j["usage"] = {{"days", u.days}, {"vehicles", u.vehicles}, {"pollsters", u.pollsters}};
  }
  for (const Violation& v : rep.violations) std::fprintf(stderr, "[%s] %s\n", family_tag(v.family), v.detail.c_str());
  std::fprintf(stderr, "%s\n", rep.ok ? "ok" : "infeasible");
  return {j, rep.ok ? Ok : Infeasible};
}

struct ExportArgs {
  bool geojson = false, lp = false;
  std::string instance, plan, out;
  bool symmetry = false, cuts = false, reduced = false;
};

Outcome cmd_export(const ExportArgs& a) {
  if (a.geojson == a.lp) throw CLI::ValidationError("choose exactly one of --geojson, --lp");
  const Instance inst = load_instance(a.instance);
  if (a.geojson) {
    if (a.plan.empty()) throw CLI::ValidationError("--geojson needs a plan file");
    const Json g = to_geojson(inst, plan_from_json(read_json_file(a.plan)));
    if (a.out.empty()) return {g, Ok};
    write_text(a.out, g.dump(2) + "\n");
    return {Json{{"written", a.out}}, Ok};
  }
  if (a.out.empty()) throw CLI::ValidationError("--lp needs -o FILE");
  ModelOptions mo;
  mo.symmetry_breaking = a.symmetry;
  mo.lower_bound_cuts = a.cuts;
  mo.reduced = a.reduced;
  const MipModel m = build_model(inst, mo);
  write_text(a.out, emit_lp(m));
  Json families = Json::object();
  for (const auto& [f, c] : m.family_census()) families[f] = c;
  return {Json{{"written", a.out},
               {"binaries", m.count(VarKind::Binary)},
               {"continuous", m.count(VarKind::Continuous)},
               {"constraints", m.constraints.size()},
               {"families", families}},
          Ok};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Integrated vehicle and pollster routing: models, bounds, exact and heuristic solvers"};
  app.require_subcommand(1);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "generate a random instance");
  gen->add_option("--n", ga.n, "number of stores")->check(CLI::PositiveNumber);
  gen->add_option("--seed", ga.seed, "random seed");
  gen->add_option("--preset", ga.row, "use one of the ten preset parameter sets (0-9)")->check(CLI::Range(0, 9));
  gen->add_option("--b-max", ga.b_max, "day length in minutes");
  gen->add_option("--pause", ga.pause, "break length in minutes");
  gen->add_option("--capacity", ga.capacity, "vehicle capacity");
  gen->add_option("--resources", ga.resources, "vehicles pollsters days (skips sizing)")->expected(3);
  gen->add_option("-o,--out", ga.out, "output file (default stdout)");

  std::string bounds_path;
  auto* bounds = app.add_subcommand("bounds", "resource lower bound and upper-bound triple");
  bounds->add_option("instance", bounds_path)->required();

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "solve an instance");
  solve->add_option("instance", sa.instance)->required();
  solve->add_flag("--exact", sa.exact, "exact branch-and-bound (n <= 6)");
  solve->add_flag("--mip", sa.mip, "full model through an external solver");
  solve->add_flag("--heuristic", sa.heuristic, "three-phase heuristic");
  solve->add_flag("--fix-heuristic", sa.fix, "three-phase heuristic, then the full model with fixed half-shifts");
  solve->add_option("--seed", sa.seed, "partition seed");
  solve->add_option("--threads", sa.threads, "parallel subset solves")->check(CLI::PositiveNumber);
  solve->add_option("--k-start", sa.k_start, "initial number of subsets (even)");
  solve->add_option("--nmax", sa.nmax, "partition iterations");
  solve->add_option("--tmax-secs", sa.tmax, "per-subset solver budget");
  solve->add_option("--solver-cmd", sa.solver_cmd, "solver template with {lp} {sol} {timelimit} {gap}");
  solve->add_option("--time-limit", sa.time_limit, "full-model solver time limit");
  solve->add_option("--gap", sa.gap, "relative gap target");
  solve->add_flag("--symmetry", sa.symmetry, "add symmetry-breaking rows");
  solve->add_flag("--cuts", sa.cuts, "add lower-bound cuts");
  solve->add_option("--node-budget", sa.node_budget, "exact search node budget");
  solve->add_option("--budget-secs", sa.budget_secs, "exact search time budget");
  solve->add_option("-o,--out", sa.out, "also write the plan to this file");

  std::string check_inst, check_plan_path;
  bool no_breaks = false;
  auto* check = app.add_subcommand("check", "check a plan against an instance");
  check->add_option("instance", check_inst)->required();
  check->add_option("plan", check_plan_path)->required();
  check->add_flag("--no-breaks", no_breaks, "reduced semantics without breaks");

  ExportArgs ea;
  auto* exp = app.add_subcommand("export", "write GeoJSON or an LP file");
  exp->add_flag("--geojson", ea.geojson, "GeoJSON of a plan");
  exp->add_flag("--lp", ea.lp, "LP file of the model");
  exp->add_option("instance", ea.instance)->required();
  exp->add_option("plan", ea.plan);
  exp->add_option("-o,--out", ea.out, "output file");
  exp->add_flag("--symmetry", ea.symmetry, "add symmetry-breaking rows");
  exp->add_flag("--cuts", ea.cuts, "add lower-bound cuts");
  exp->add_flag("--reduced", ea.reduced, "single-day reduced model");

  Outcome o;
  try {
    app.parse(argc, argv);
    if (gen->parsed()) o = cmd_gen(ga);
    else if (bounds->parsed()) o = cmd_bounds(bounds_path);
    else if (solve->parsed()) o = cmd_solve(sa);
    else if (check->parsed()) o = cmd_check(check_inst, check_plan_path, no_breaks);
    else if (exp->parsed()) o = cmd_export(ea);
  } catch (const CLI::CallForHelp&) {
    std::cerr << app.help();
    o = {Json{{"usage", app.help()}}, Ok};
  } catch (const CLI::CallForAllHelp&) {
    std::cerr << app.help("", CLI::AppFormatMode::All);
    o = {Json{{"usage", app.help("", CLI::AppFormatMode::All)}}, Ok};
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    o = {Json{{"error", e.what()}}, Usage};
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    o = {Json{{"error", e.what()}}, Usage};
  }
  std::cout << o.json.dump(2) << "\n";
  return o.code;
}
