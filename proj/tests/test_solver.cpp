#include <gtest/gtest.h>

#include <cstdlib>
#include <random>

#include "fixtures.hpp"
#include "ivprp/exact.hpp"
#include "ivprp/gen.hpp"
#include "ivprp/heuristic.hpp"
#include "ivprp/solver.hpp"

using namespace ivprp;

namespace {

bool has_module(const std::string& module) {
  const std::string cmd = "python3 -c 'import " + module + "' >/dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

SolverConfig script(const std::string& file, double time_limit = 60) {
  SolverConfig c;
  c.command = std::string("python3 ") + IVPRP_TOOLS_DIR + "/" + file + " {lp} {sol} {timelimit} {gap}";
  c.time_limit = time_limit;
  return c;
}

SolverConfig shell(const std::string& body) {
  SolverConfig c;
  c.command = body + " ; : {lp}";
  return c;
}

#define REQUIRE_MODULE(m) \
  if (!has_module(m)) GTEST_SKIP() << m " not importable"

/// Tiny instances where both the oracle and a MIP solver finish quickly.
std::vector<Instance> tiny_suite() {
  std::vector<Instance> out;
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 6; ++rep) {
    Instance in = fixtures::random_small(rng, 1 + rep % 2, 40, 4);
    in.num_days = 1 + rep % 2;
    in.num_pollsters = 1 + (rep / 2) % 2;
    in.num_vehicles = 1;
    in.capacity = in.num_pollsters;
    out.push_back(in);
  }
  return out;
}

}  // namespace

TEST(SolverConfig, Validation) {
  SolverConfig c;
  c.command = "solve {sol}";
  EXPECT_THROW(check_config(c), Error);
  c.command = "solve {lp} {sol}";
  EXPECT_NO_THROW(check_config(c));
  c.time_limit = 0;
  EXPECT_THROW(check_config(c), Error);
}

TEST(SolverConfig, FromEnvironment) {
  ::setenv("IVPRP_SOLVER_CMD", "mysolver {lp} {sol}", 1);
  auto c = solver_config_from_env();
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->command, "mysolver {lp} {sol}");
  ::unsetenv("IVPRP_SOLVER_CMD");
  EXPECT_FALSE(solver_config_from_env().has_value());
}

TEST(SolverAdapter, ExitCodeTable) {
  const MipModel m = build_model(fixtures::uniform(1, 1, 1, 10));
  SolverConfig c = shell("exit 3");
  c.exit_status[3] = SolveStatus::Infeasible;
  EXPECT_EQ(solve_via_external(m, c).status, SolveStatus::Infeasible);
  EXPECT_THROW(solve_via_external(m, shell("exit 4")), Error);
}

TEST(SolverAdapter, MissingVariablesDefaultToZero) {
  const Instance in = fixtures::uniform(1, 1, 1, 10);
  const MipModel m = build_model(in);
  const SolveResult r = solve_via_external(m, shell("printf '# status: feasible\\nu_0 1\\nbogus 7\\n' > {sol}"));
  EXPECT_EQ(r.status, SolveStatus::Feasible);
  EXPECT_EQ(r.values.size(), m.variables.size());
  EXPECT_EQ(r.values.at("u_0"), 1);
  EXPECT_EQ(r.values.count("bogus"), 0u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_DOUBLE_EQ(*r.objective, in.costs.day);
}

TEST(SolverAdapter, MalformedOutputIsAnError) {
  const MipModel m = build_model(fixtures::uniform(1, 1, 1, 10));
  EXPECT_THROW(solve_via_external(m, shell("echo '# status: fine' > {sol}")), Error);
  EXPECT_THROW(solve_via_external(m, shell("echo '# status: optimal' > {sol}")), Error);
}

TEST(SolverAdapter, KeepsFilesWhenAsked) {
  const MipModel m = build_model(fixtures::uniform(1, 1, 1, 10));
  const auto dir = std::filesystem::temp_directory_path() / "ivprp-keep-test";
  std::filesystem::remove_all(dir);
  SolverConfig c = shell("exit 0");
  c.command = "cp {lp} " + (dir / "copy.lp").string() + " ; : {sol}";
  c.exit_status[0] = SolveStatus::Infeasible;
  std::filesystem::create_directories(dir);
  c.work_dir = dir;
  c.keep_files = true;
  solve_via_external(m, c);
  EXPECT_TRUE(std::filesystem::exists(dir / "copy.lp"));
  int kept = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) kept += e.is_directory();
  EXPECT_EQ(kept, 1);
  std::filesystem::remove_all(dir);
}

TEST(SolverHighs, TinySuiteMatchesTheOracle) {
  REQUIRE_MODULE("highspy");
  for (const Instance& in : tiny_suite()) {
    const MipModel m = build_model(in);
    const SolveResult r = solve_via_external(m, script("highs_solve.py"));
    const ExactResult x = solve_exact(in);
    if (x.status == ExactStatus::Infeasible) {
      EXPECT_EQ(r.status, SolveStatus::Infeasible);
      continue;
    }
    ASSERT_EQ(r.status, SolveStatus::Optimal);
    const Plan p = parse_solution(m, r.values);
    EXPECT_TRUE(check_plan(in, p).ok);
    EXPECT_DOUBLE_EQ(plan_cost(in, p), x.cost);
    EXPECT_NEAR(*r.objective, x.cost, 1e-6);
  }
}

TEST(SolverGlpk, AgreesWithHighsOnTheTinySuite) {
  REQUIRE_MODULE("highspy");
  REQUIRE_MODULE("cvxopt.glpk");
  for (const Instance& in : tiny_suite()) {
    const MipModel m = build_model(in);
    const SolveResult a = solve_via_external(m, script("highs_solve.py"));
    const SolveResult b = solve_via_external(m, script("glpk_solve.py"));
    ASSERT_EQ(a.status, b.status);
    if (a.status != SolveStatus::Optimal) continue;
    EXPECT_NEAR(*a.objective, *b.objective, 1e-6);
    EXPECT_TRUE(check_plan(in, parse_solution(m, b.values)).ok);
  }
}

TEST(SolverHighs, ReferenceOptimum) {
  REQUIRE_MODULE("highspy");
  const Instance in = fixtures::four_stores();
  ModelOptions mo;
  mo.symmetry_breaking = true;
  mo.lower_bound_cuts = true;
  const MipModel m = build_model(in, mo);
  const SolveResult r = solve_via_external(m, script("highs_solve.py", 300));
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  const Plan p = parse_solution(m, r.values);
  EXPECT_TRUE(check_plan(in, p).ok);
  EXPECT_DOUBLE_EQ(plan_cost(in, p), 560);
}

TEST(SolverHighs, ContradictoryCutsAreInfeasible) {
  REQUIRE_MODULE("highspy");
  const Instance in = fixtures::four_stores();
  ModelOptions mo;
  mo.lower_bound_cuts = true;
  mo.cut_values = ResourceTriple{in.num_days + 1, 0, 0};
  EXPECT_EQ(solve_via_external(build_model(in, mo), script("highs_solve.py")).status, SolveStatus::Infeasible);
}

TEST(SolverHighs, FixingTheKnownOptimumResolvesTo560) {
  REQUIRE_MODULE("highspy");
  const Instance in = fixtures::four_stores();
  const MipModel m = build_model(in);
  std::map<std::string, double> fixed;
  for (const auto& [name, value] : encode_plan(in, fixtures::four_stores_plan(), false)) {
    const char c = name[0];
    if (c != 'x' && c != 'y' && c != 'z') continue;
    const auto idx = detail::parse_indices(name);
    if (idx[0] == 0 || idx[1] == 2 * in.n + 1) continue;
    fixed[name] = value;
  }
  ASSERT_FALSE(fixed.empty());
  const SolveResult r = fix_and_resolve(m, fixed, script("highs_solve.py"));
  ASSERT_EQ(r.status, SolveStatus::Optimal);
  EXPECT_NEAR(*r.objective, 560, 1e-6);
}

TEST(SolverHighs, ServingAStoreTwiceIsInfeasible) {
  REQUIRE_MODULE("highspy");
  const MipModel m = build_model(fixtures::four_stores());
  const SolveResult r = fix_and_resolve(m, {{"x_1_5_0_0", 1}, {"x_1_5_1_0", 1}}, script("highs_solve.py"));
  EXPECT_EQ(r.status, SolveStatus::Infeasible);
}

TEST(SolverHighs, FixingNothingIsAPlainSolve) {
  REQUIRE_MODULE("highspy");
  const Instance in = tiny_suite()[3];
  const MipModel m = build_model(in);
  const SolveResult a = solve_via_external(m, script("highs_solve.py"));
  const SolveResult b = fix_and_resolve(m, {}, script("highs_solve.py"));
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.values, b.values);
  EXPECT_THROW(fix_and_resolve(m, {{"no_such_var", 1}}, script("highs_solve.py")), Error);
}

TEST(SolverHighs, TinyTimeLimitOnALargerModel) {
  REQUIRE_MODULE("highspy");
  std::mt19937_64 rng(2);
  Instance in = fixtures::random_small(rng, 14, 100, 10);
  in.num_days = 2;
  in.num_pollsters = 2;
  in.num_vehicles = 2;
  in.capacity = 2;
  const SolveResult r = solve_via_external(build_model(in), script("highs_solve.py", 0.01));
  EXPECT_TRUE(r.status == SolveStatus::Timeout || (r.status == SolveStatus::Feasible && r.gap && *r.gap > 0))
      << status_tag(r.status);
}

TEST(SolverHighs, HalfShiftsThroughTheSolver) {
  REQUIRE_MODULE("highspy");
  const Instance in = fixtures::four_stores();
  const SubsetOutcome a = solve_subset(in, {3}, 30, script("highs_solve.py"));
  ASSERT_TRUE(a.plan.has_value()) << a.reason;
  EXPECT_EQ(a.plan->method, "solver-optimal");
  EXPECT_EQ(a.plan->last_arrival, Minutes::whole(14));
  const SubsetOutcome b = solve_subset(in, {1, 2}, 30, script("highs_solve.py"));
  EXPECT_FALSE(b.plan.has_value());
}

TEST(SolverHighs, FixingHeuristicReturnsACheckedPlan) {
  REQUIRE_MODULE("highspy");
  GenParams gp = preset_params(0, 7);
  const Instance in = generate_instance(gp);
  const FixResult r = fix_heuristic(in, {}, script("highs_solve.py"));
  ASSERT_TRUE(r.ok) << r.failure;
  ASSERT_FALSE(r.steps.empty());
  EXPECT_TRUE(r.steps.back().kept);
  EXPECT_TRUE(check_plan(in, r.plan).ok);
  EXPECT_LE(r.cost, r.base.cost);
  EXPECT_GE(r.cost, *r.base.lower_bound);
}

TEST(FixHeuristic, FixingsStayInsideTheirSubset) {
  const Instance in = generate_instance(preset_params(1, 3));
  const HeuristicResult h = run_three_phase(in, {});
  ASSERT_TRUE(h.ok);
  const MipModel m = build_model(in);
  int with_fixings = 0;
  for (std::size_t j = 0; j < h.half_shifts.size(); ++j) {
    const auto fixed = half_shift_fixings(in, m, h, static_cast<int>(j));
    std::set<int> nodes;
    for (int s : h.half_shifts[j].stores) {
      nodes.insert(s);
      nodes.insert(s + in.n);
    }
    int ones = 0;
    for (const auto& [name, value] : fixed) {
      const auto idx = detail::parse_indices(name);
      EXPECT_TRUE(nodes.count(idx[0])) << name;
      if (name[0] == 'x' || name[0] == 'y' || name[0] == 'z') {
        EXPECT_TRUE(nodes.count(idx[1])) << name;
      }
      ones += value == 1;
    }
    // an afternoon crew offset past the model's labels cannot be fixed
    int e_off = 0;
    for (auto [mo, af] : h.day_pairs)
      if (af == static_cast<int>(j)) e_off = h.half_shifts[static_cast<std::size_t>(mo)].pollsters;
    if (e_off + h.half_shifts[j].pollsters <= in.num_pollsters) {
      EXPECT_GT(ones, 0) << "half-shift " << j;
    }
    with_fixings += ones > 0;
  }
  EXPECT_GT(with_fixings, 0);
}
