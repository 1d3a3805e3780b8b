// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fixtures.hpp"
#include "ivprp/bounds.hpp"
#include "ivprp/exact.hpp"
#include "ivprp/gen.hpp"
#include "ivprp/heuristic.hpp"
#include "ivprp/matching.hpp"
#include "ivprp/mip_model.hpp"
#include "support/bound_scans.hpp"
#include "support/lp_reader.hpp"
#include "support/model_enumerator.hpp"

using namespace ivprp;

namespace {

// Pinned tolerances and limits.
constexpr double kCostTol = 0.0;            // integer costs compare exactly
constexpr double kGapTol = 1e-12;           // recomputed gap vs reported gap
constexpr double kOracleSecs = 60;          // golden optimum runtime
constexpr double kHeuristicSecs = 600;      // ten preset rows, total
constexpr double kGoldenReturn = 30;        // depot return of the golden plan
constexpr int kSandwichInstances = 50;
constexpr int kClosedFormTuples = 200;
constexpr int kMatchingTrials = 100;
constexpr std::uint64_t kPresetSeed = 7;

using Clock = std::chrono::steady_clock;

double secs_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string triple(int s, int k, int e) { return "(" + std::to_string(s) + "," + std::to_string(k) + "," + std::to_string(e) + ")"; }

Instance four_stores() { return load_instance(IVPRP_SAMPLES_DIR "/four_stores.json"); }

Plan golden_plan() { return plan_from_json(read_json_file(IVPRP_SAMPLES_DIR "/four_stores_plan.json")); }

Verdict golden_optimum() {
  const auto t = Clock::now();
  const ExactResult r = solve_exact(four_stores());
  const double secs = secs_since(t);
  if (r.status != ExactStatus::Optimal || !r.plan) return {false, std::string("status ") + status_tag(r.status)};
  const bool ok = std::fabs(r.cost - 560) <= kCostTol && r.counts == ResourceTriple{1, 1, 2} && secs < kOracleSecs;
  return {ok, "cost " + fmt(r.cost) + " (days,vehicles,pollsters) " + triple(r.counts.days, r.counts.vehicles, r.counts.pollsters) +
                  " in " + fmt(std::round(secs * 100) / 100) + "s"};
}

Verdict golden_plan_check() {
  const Instance inst = four_stores();
  const Plan plan = golden_plan();
  const auto rep = check_plan(inst, plan);
  if (!rep.ok) return {false, "checker: " + report_to_json(rep).dump()};
  const DayPlan& d = plan.days.at(0);
  const bool shape = d.vehicles.size() == 1 && d.vehicles[0].nodes == std::vector<int>{0, 1, 4, 8, 3, 7, 6, 9} &&
                     d.pollsters.size() == 2 && d.pollsters[0].break_store == 2 && d.pollsters[1].break_store == 3;
  std::set<std::vector<int>> walks;
  for (const auto& p : d.pollsters)
    for (const auto& l : p.legs)
      if (l.kind == LegKind::Walk) walks.insert(l.nodes);
  const bool walks_ok = walks == std::set<std::vector<int>>{{1, 5, 2, 6}, {4, 8}, {3, 7}};
  const auto ret = rep.schedule.day_return.at(0);
  const double cost = plan_cost(inst, plan);
  const bool ok = shape && walks_ok && ret && ret->value() <= kGoldenReturn && std::fabs(cost - 560) <= kCostTol;
  return {ok, "return " + (ret ? ret->str() : std::string("none")) + " cost " + fmt(cost) + (shape && walks_ok ? "" : " (shape differs)")};
}

Verdict model_equivalence() {
  struct Setting {
    int n, days, pollsters, vehicles, capacity;
  };
  const std::array<Setting, 3> settings{{{1, 1, 1, 1, 1}, {2, 1, 2, 1, 2}, {2, 2, 1, 2, 1}}};
  std::size_t discrepancies = 0, points = 0, plans = 0;
  for (const Setting& s : settings) {
    Instance inst = fixtures::uniform(s.n, 3, 2, 60, 2);
    inst.t0 = Minutes::whole(5);
    inst.t1 = Minutes::whole(50);
    inst.num_days = s.days;
    inst.num_pollsters = s.pollsters;
    inst.num_vehicles = s.vehicles;
    inst.capacity = s.capacity;
    const MipModel m = build_model(inst);
    std::set<std::string> image, oracle;
    model_enum::Enumerator e(m);
    points += e.run([&](const Assignment& a) {
      const Plan p = parse_solution(m, a);
      if (!check_plan(inst, p).ok) ++discrepancies;
      image.insert(to_json(canonicalize_plan(inst, p)).dump());
    });
    for (const Plan& p : enumerate_feasible(inst)) {
      oracle.insert(to_json(p).dump());
      if (!row_violations(m, encode_plan(inst, p, true)).empty()) ++discrepancies;
    }
    plans += oracle.size();
    for (const auto& j : image) discrepancies += !oracle.count(j);
    for (const auto& j : oracle) discrepancies += !image.count(j);
  }
  return {discrepancies == 0, fmt(static_cast<double>(points)) + " model points, " + fmt(static_cast<double>(plans)) +
                                  " checked plans, " + fmt(static_cast<double>(discrepancies)) + " discrepancies"};
}

Verdict bounds_sandwich() {
  int compared = 0, violations = 0, infeasible = 0;
  for (int i = 0; i < kSandwichInstances; ++i) {
    GenParams p;
    p.n = 1 + i % 5;
    p.seed = 1000 + static_cast<std::uint64_t>(i);
    const Instance inst = generate_instance(p);
    const auto b = compute_bounds(inst);
    const ExactResult r = solve_exact(inst);
    if (r.status != ExactStatus::Optimal) {
      ++infeasible;
      if (b.upper) ++violations;  // the upper bound certifies feasibility
      continue;
    }
    if (b.lower.feasible() && b.lower.bound->cost > r.cost + kCostTol) ++violations;
    if (b.upper && r.cost > b.upper->objective + kCostTol) ++violations;
    if (b.lower.feasible() && b.upper) ++compared;
  }
  return {violations == 0, fmt(compared) + " full sandwiches, " + fmt(infeasible) + " without an optimum, " + fmt(violations) + " violations"};
}

Verdict lower_bound_closed_forms() {
  using bound_scans::scan_lower;
  using bound_scans::with_totals;
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> small(1, 6), cap(1, 4);
  std::uniform_real_distribution<double> service(1, 400), bmax(20, 200), pause(0, 30);
  int mismatches = 0, feasible = 0;
  for (int rep = 0; rep < kClosedFormTuples; ++rep) {
    const Instance in = with_totals(std::round(service(rng) * 100) / 100, std::round(bmax(rng)), std::round(pause(rng)),
                                    small(rng), small(rng), small(rng), cap(rng));
    const auto lb = lower_bound_resources(in);
    const auto sc = scan_lower(in);
    if (lb.feasible() != sc.triple.has_value()) {
      ++mismatches;
      continue;
    }
    if (!lb.feasible()) continue;
    ++feasible;
    const auto ceil_div = [](std::int64_t a, std::int64_t b) { return (a + b - 1) / b; };
    const std::int64_t le = std::max<std::int64_t>(1, ceil_div(in.total_service().centi(), (in.b_max - in.pause).centi()));
    const std::int64_t ls = ceil_div(le, in.num_pollsters);
    const std::int64_t lk = std::max(ls, ceil_div(le, in.capacity));
    const ResourceTriple formula{static_cast<int>(ls), static_cast<int>(lk), static_cast<int>(le)};
    if (!(lb.bound->counts == *sc.triple) || !(formula == *sc.triple)) ++mismatches;
  }
  // 15 pollster-shifts of 380 minutes, five pollsters per day, four seats per vehicle
  const auto shape = lower_bound_resources(with_totals(14 * 380 + 1, 420, 40, 15, 5, 3, 4));
  const bool shape_ok = shape.feasible() && shape.bound->counts == ResourceTriple{3, 4, 15};
  return {mismatches == 0 && shape_ok, fmt(kClosedFormTuples) + " tuples (" + fmt(feasible) + " feasible), " + fmt(mismatches) +
                                           " mismatches; shape " + (shape.feasible() ? triple(shape.bound->counts.days, shape.bound->counts.vehicles, shape.bound->counts.pollsters) : "none")};
}

double brute_matching(const std::vector<std::vector<double>>& w, std::vector<bool>& used) {
  int i = 0;
  while (i < static_cast<int>(w.size()) && used[static_cast<std::size_t>(i)]) ++i;
  if (i == static_cast<int>(w.size())) return 0;
  used[static_cast<std::size_t>(i)] = true;
  double best = INFINITY;
  for (int j = i + 1; j < static_cast<int>(w.size()); ++j) {
    if (used[static_cast<std::size_t>(j)]) continue;
    used[static_cast<std::size_t>(j)] = true;
    best = std::min(best, w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] + brute_matching(w, used));
    used[static_cast<std::size_t>(j)] = false;
  }
  used[static_cast<std::size_t>(i)] = false;
  return best;
}

Verdict matching_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> weight(0, 1000);
  int mismatches = 0, trials = 0;
  for (int k : {2, 4, 6, 8})
    for (int t = 0; t < kMatchingTrials; ++t) {
      std::vector<std::vector<double>> w(static_cast<std::size_t>(k), std::vector<double>(static_cast<std::size_t>(k), 0));
      for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) w[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = w[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = weight(rng);
      std::vector<bool> used(static_cast<std::size_t>(k), false);
      const Pairing p = min_cost_perfect_matching(w);
      std::set<int> covered;
      for (auto [a, b] : p) covered.insert({a, b});
      mismatches += pairing_weight(w, p) != brute_matching(w, used) || static_cast<int>(covered.size()) != k;
      ++trials;
    }
  return {mismatches == 0, fmt(trials) + " matrices, " + fmt(mismatches) + " mismatches"};
}

bool highs_available() { return std::system("python3 -c 'import highspy' >/dev/null 2>&1") == 0; }

Verdict heuristic_end_to_end() {
  const auto t = Clock::now();
  std::string detail;
  bool ok = true;
  for (int row = 0; row < 10; ++row) {
    const Instance inst = generate_instance(preset_params(row, kPresetSeed));
    HeuristicParams hp;
    hp.seed = kPresetSeed;
    const HeuristicResult r = run_three_phase(inst, hp);
    bool row_ok = r.ok && check_plan(inst, r.plan).ok;
    if (row_ok && r.lower_bound) {
      row_ok = *r.lower_bound <= r.cost + kCostTol && r.gap && std::fabs(*r.gap - (r.cost - *r.lower_bound) / r.cost) <= kGapTol;
    }
    if (inst.n <= 30) ok = ok && row_ok;
    detail += " n" + std::to_string(inst.n) + (r.ok ? "=" + fmt(r.cost) : "=fail");
    if (row == 0) {
      // expected shape: two vehicles, two pollsters, one day, cost 480
      const bool shape = r.ok && r.usage.days == 1 && r.usage.vehicles == 2 && r.usage.pollsters == 2 && std::fabs(r.cost - 480) <= kCostTol;
      ok = ok && shape;
      if (!shape) detail += "(shape " + triple(r.usage.days, r.usage.vehicles, r.usage.pollsters) + ")";
    }
  }
  const double secs = secs_since(t);
  ok = ok && secs < kHeuristicSecs;
  detail += "; " + fmt(std::round(secs * 100) / 100) + "s";
  if (highs_available()) {
    const Instance inst = generate_instance(preset_params(0, kPresetSeed));
    SolverConfig cfg;
    cfg.command = "python3 " IVPRP_TOOLS_DIR "/highs_solve.py {lp} {sol} {timelimit} {gap}";
    HeuristicParams hp;
    hp.seed = kPresetSeed;
    hp.t_max_secs = 20;
    const HeuristicResult r = run_three_phase(inst, hp, cfg);
    const bool shape = r.ok && check_plan(inst, r.plan).ok && r.usage.days == 1 && r.usage.vehicles == 2 && r.usage.pollsters == 2 &&
                       std::fabs(r.cost - 480) <= kCostTol;
    ok = ok && shape;
    detail += "; with HiGHS n10=" + (r.ok ? fmt(r.cost) : std::string("fail"));
  } else {
    detail += "; HiGHS not available, solver run skipped";
  }
  return {ok, detail.substr(1)};
}

Verdict partition_behaviour() {
  GenParams p;
  p.n = 200;
  p.seed = 11;
  p.b_max = 420;
  p.pause = 40;
  p.capacity = 2;
  p.resources = std::array<int, 3>{2, 3, 4};
  const Instance inst = generate_instance(p);
  HeuristicParams hp;
  hp.seed = 11;
  hp.threads = 4;
  const auto t = Clock::now();
  const HeuristicResult r = run_three_phase(inst, hp);
  const double secs = secs_since(t);
  const Minutes horizon = half_shift_horizon(inst);
  const int cap = 2 * inst.num_days;
  bool ok = !r.attempts.empty();
  int monotone_breaks = 0, over_horizon = 0, half_shifts = 0;
  std::string ks;
  for (const Attempt& a : r.attempts) {
    ok = ok && a.k >= 2 && a.k <= cap;
    ks += (ks.empty() ? "" : ",") + std::to_string(a.k);
    for (std::size_t i = 1; i < a.history.size(); ++i) monotone_breaks += a.history[i] > a.history[i - 1];
    for (const SubsetReport& s : a.subsets)
      if (s.feasible) {
        ++half_shifts;
        over_horizon += s.last_arrival > horizon;
      }
  }
  for (const HalfShiftPlan& h : r.half_shifts) {
    const SubInstance sub = half_shift_instance(inst, h.stores);
    Plan one;
    one.days = {h.day};
    over_horizon += !check_plan(sub.inst, one, CheckOptions{false}).ok;
  }
  if (r.ok) ok = ok && check_plan(inst, r.plan).ok;
  ok = ok && monotone_breaks == 0 && over_horizon == 0;
  return {ok, std::string(r.ok ? "solved" : "failed") + " with k in {" + ks + "} (cap " + std::to_string(cap) + "), " +
                  fmt(half_shifts) + " half-shifts within " + horizon.str() + ", " + fmt(monotone_breaks) + " monotonicity breaks, " +
                  fmt(over_horizon) + " over the horizon, " + fmt(std::round(secs * 100) / 100) + "s"};
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* f = popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!f) return "<popen failed>";
  std::array<char, 4096> buf{};
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), f)) > 0) out.append(buf.data(), got);
  const int status = pclose(f);
  return out + "\n<exit " + std::to_string(status) + ">";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

Verdict cli_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("ivprp_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = "env -u IVPRP_SOLVER_CMD " IVPRP_CLI;
  const std::string four = IVPRP_SAMPLES_DIR "/four_stores.json", plan = IVPRP_SAMPLES_DIR "/four_stores_plan.json";
  const std::string row0 = (dir / "row0.json").string(), big = (dir / "big.json").string();
  struct Case {
    std::string name, cmd, file;
  };
  const std::vector<Case> cases{
      {"gen", cli + " gen --preset 0 --seed 7 -o " + row0, row0},
      {"gen-200", cli + " gen --n 200 --seed 11 --b-max 420 --pause 40 --capacity 2 --resources 2 3 4 -o " + big, big},
      {"bounds", cli + " bounds " + four, ""},
      {"exact", cli + " solve --exact " + four, ""},
      {"check", cli + " check " + four + " " + plan, ""},
      {"heuristic", cli + " solve --heuristic --seed 3 " + row0, ""},
      {"heuristic-threads", cli + " solve --heuristic --seed 3 --threads 4 " + row0, ""},
      {"heuristic-200", cli + " solve --heuristic --seed 5 --threads 4 " + big, ""},
      {"geojson", cli + " export --geojson " + four + " " + plan + " -o " + (dir / "plan.geojson").string(), (dir / "plan.geojson").string()},
      {"lp", cli + " export --lp " + four + " -o " + (dir / "model.lp").string(), (dir / "model.lp").string()},
  };
  std::vector<std::string> differing;
  std::string single_thread;
  for (const Case& c : cases) {
    std::string runs[2];
    for (auto& out : runs) {
      out = capture(c.cmd);
      if (!c.file.empty()) out += slurp(c.file);
    }
    if (runs[0] != runs[1] || runs[0].find("<exit 0>") == std::string::npos) differing.push_back(c.name);
    if (c.name == "heuristic") single_thread = runs[0];
    if (c.name == "heuristic-threads" && runs[0] != single_thread) differing.push_back("threads 1 vs 4");
  }
  fs::remove_all(dir);
  std::string detail = fmt(static_cast<double>(cases.size())) + " commands run twice";
  for (const auto& d : differing) detail += ", differs or fails: " + d;
  return {differing.empty(), detail};
}

Verdict lp_round_trip() {
  const Instance inst = four_stores();
  const MipModel m = build_model(inst);
  const auto lp = lp_reader::read(emit_lp(m));
  const int n = inst.n, E = inst.num_pollsters, K = inst.num_vehicles, S = inst.num_days;
  const int vehicular = 4 * n * n - n;
  const int binaries = S * (E * (n * n + vehicular + 3 * n) + K * vehicular + 1);
  const int continuous = 2 * n;
  std::set<std::string> bin_names(lp.binaries.begin(), lp.binaries.end());
  int model_bin = 0;
  bool names_ok = true;
  for (const auto& v : m.variables)
    if (v.kind == VarKind::Binary) {
      ++model_bin;
      names_ok = names_ok && bin_names.count(v.name);
    } else {
      names_ok = names_ok && lp.bounds.count(v.name);
    }
  std::map<std::string, std::string> family_of;
  for (const auto& c : m.constraints) family_of[c.name] = c.family;
  std::map<std::string, int> lp_families;
  for (const auto& name : lp.row_order) ++lp_families[family_of.count(name) ? family_of[name] : "?"];
  bool rows_ok = lp.row_order.size() == m.constraints.size();
  for (std::size_t r = 0; rows_ok && r < m.constraints.size(); ++r) rows_ok = lp.row_order[r] == m.constraints[r].name;
  const bool ok = names_ok && rows_ok && static_cast<int>(bin_names.size()) == model_bin && model_bin == binaries &&
                  static_cast<int>(lp.bounds.size()) == continuous && m.count(VarKind::Continuous) == continuous && binaries == 594 &&
                  continuous == 8 && lp_families == m.family_census();
  return {ok, fmt(static_cast<double>(bin_names.size())) + " binaries, " + fmt(static_cast<double>(lp.bounds.size())) + " continuous, " +
                  fmt(static_cast<double>(lp.rows.size())) + " rows re-parsed; closed form " + fmt(binaries) + "/" + fmt(continuous)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"golden optimum", golden_optimum},
      {"golden plan check", golden_plan_check},
      {"model and checker agree", model_equivalence},
      {"bounds sandwich", bounds_sandwich},
      {"lower-bound closed forms", lower_bound_closed_forms},
      {"matching oracle", matching_oracle},
      {"heuristic end to end", heuristic_end_to_end},
      {"partition behaviour", partition_behaviour},
      {"determinism", cli_determinism},
      {"LP round trip", lp_round_trip},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << "AC" << i + 1 << " " << (v.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
