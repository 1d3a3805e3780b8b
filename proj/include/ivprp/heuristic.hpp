#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "ivprp/bounds.hpp"
#include "ivprp/matching.hpp"
#include "ivprp/mip_model.hpp"
#include "ivprp/partition.hpp"
#include "ivprp/plan.hpp"
#include "ivprp/solver.hpp"

namespace ivprp {

/// A subset of stores as a one-day, break-free problem over the half-shift
/// horizon. Sub-store i is original store stores[i-1].
struct SubInstance {
  Instance inst;
  std::vector<int> stores;
};

inline SubInstance half_shift_instance(const Instance& inst, const std::vector<int>& stores) {
  if (stores.empty()) throw Error("half-shift subset must not be empty");
  const auto m = stores.size();
  SubInstance sub;
  sub.stores = stores;
  Instance& s = sub.inst;
  s.n = static_cast<int>(m);
  s.num_days = 1;
  s.num_pollsters = inst.num_pollsters;
  s.num_vehicles = inst.num_vehicles;
  s.capacity = inst.capacity;
  s.b_max = half_shift_horizon(inst);
  s.pause = Minutes{};
  s.t0 = Minutes{};
  s.t1 = s.b_max;
  s.costs = inst.costs;
  s.service.resize(m);
  s.drive_out.resize(m);
  s.drive_in.resize(m);
  s.walk.assign(m, std::vector<Minutes>(m));
  s.drive_store.assign(m, std::vector<Minutes>(m));
  for (std::size_t a = 0; a < m; ++a) {
    const int sa = stores[a];
    if (sa < 1 || sa > inst.n) throw Error("store " + std::to_string(sa) + " out of range");
    const auto A = static_cast<std::size_t>(sa - 1);
    s.service[a] = inst.service[A];
    s.drive_out[a] = inst.drive_out[A];
    s.drive_in[a] = inst.drive_in[A];
    for (std::size_t b = 0; b < m; ++b) {
      const auto B = static_cast<std::size_t>(stores[b] - 1);
      s.walk[a][b] = inst.walk[A][B];
      s.drive_store[a][b] = inst.drive_store[A][B];
    }
  }
  if (inst.coords) {
    std::vector<std::array<double, 2>> c;
    for (int st : stores) c.push_back((*inst.coords)[static_cast<std::size_t>(st - 1)]);
    s.coords = c;
  }
  return sub;
}

/// Routes of one subset over one half-shift, in sub-instance numbering.
struct HalfShiftPlan {
  int subset = 0;
  std::vector<int> stores;
  DayPlan day;
  int vehicles = 0;   // k-bar
  int pollsters = 0;  // e-bar
  Minutes last_arrival;
  double cost = 0;  // reduced-model objective
  std::string method;
};

struct SubsetOutcome {
  std::optional<HalfShiftPlan> plan;
  std::string reason;  // why no plan, or notes on the solve
};

namespace detail {

using Segment = std::vector<int>;                // sub-store ids in walking order
using CrewPlan = std::vector<std::vector<Segment>>;  // pollster -> segments

struct VehicleEvent {
  int pollster;
  bool drop;
  int node;
};

struct VehicleRun {
  Minutes ret;
  std::vector<VehicleEvent> events;
};

struct Score {
  Minutes makespan;
  Minutes total;
  auto operator<=>(const Score&) const = default;
};

/// Internal half-shift solver: pollster p rides vehicle p mod k-bar and owns a
/// list of walking segments; each vehicle serves its pollsters by always
/// taking the earliest-completing drop or pickup.
class HalfShiftBuilder {
 public:
  HalfShiftBuilder(const Instance& sub, int vehicles, int pollsters)
      : in_(sub), m_(sub.n), kbar_(vehicles), ebar_(pollsters) {}

  Minutes walk_finish(const Segment& seg, Minutes start) const {
    Minutes t = start;
    for (std::size_t i = 0; i < seg.size(); ++i) {
      t += in_.service_time(seg[i]);
      if (i + 1 < seg.size()) t += in_.walk_time(seg[i] + m_, seg[i + 1]);
    }
    return t;
  }

  VehicleRun simulate(const CrewPlan& crew, int v) const {
    VehicleRun run;
    std::vector<int> ps;
    for (int p = v; p < ebar_; p += kbar_)
      if (!crew[static_cast<std::size_t>(p)].empty()) ps.push_back(p);
    if (ps.empty()) return run;
    std::vector<std::size_t> next(static_cast<std::size_t>(ebar_), 0);
    std::vector<bool> walking(static_cast<std::size_t>(ebar_), false);
    std::vector<Minutes> ready(static_cast<std::size_t>(ebar_));
    int loc = 0;
    Minutes now;
    while (true) {
      std::optional<std::tuple<Minutes, int, int>> best;  // (time, pollster, node)
      for (int p : ps) {
        const auto P = static_cast<std::size_t>(p);
        const auto& segs = crew[P];
        if (next[P] >= segs.size()) continue;
        const Segment& seg = segs[next[P]];
        const int node = walking[P] ? seg.back() + m_ : seg.front();
        Minutes t = now + in_.drive_time(loc, node);
        if (walking[P]) t = std::max(t, ready[P]);
        if (!best || std::make_tuple(t, p, node) < *best) best = std::make_tuple(t, p, node);
      }
      if (!best) break;
      const auto [t, p, node] = *best;
      const auto P = static_cast<std::size_t>(p);
      const bool drop = !walking[P];
      if (drop) {
        walking[P] = true;
        ready[P] = walk_finish(crew[P][next[P]], t);
      } else {
        walking[P] = false;
        ++next[P];
      }
      run.events.push_back({p, drop, node});
      loc = node;
      now = t;
    }
    run.ret = now + in_.drive_time(loc, 2 * m_ + 1);
    return run;
  }

  Score score(const std::vector<Minutes>& rets) const {
    Score s;
    for (Minutes r : rets) {
      s.makespan = std::max(s.makespan, r);
      s.total += r;
    }
    return s;
  }

  std::vector<Minutes> returns(const CrewPlan& crew) const {
    std::vector<Minutes> r(static_cast<std::size_t>(kbar_));
    for (int v = 0; v < kbar_; ++v) r[static_cast<std::size_t>(v)] = simulate(crew, v).ret;
    return r;
  }

  // Best place for store s among all segment positions and new segments.
  std::optional<std::pair<Score, CrewPlan>> best_insertion(const CrewPlan& crew, const std::vector<Minutes>& rets, int s,
                                                           std::optional<int> only = std::nullopt) const {
    std::optional<std::pair<Score, CrewPlan>> best;
    auto consider = [&](CrewPlan cand, int p) {
      std::vector<Minutes> r = rets;
      const int v = p % kbar_;
      r[static_cast<std::size_t>(v)] = simulate(cand, v).ret;
      const Score sc = score(r);
      if (!best || sc < best->first) best = std::make_pair(sc, std::move(cand));
    };
    for (int p = 0; p < ebar_; ++p) {
      if (only && p != *only) continue;
      const auto& segs = crew[static_cast<std::size_t>(p)];
      for (std::size_t g = 0; g <= segs.size(); ++g) {
        CrewPlan cand = crew;
        auto& cs = cand[static_cast<std::size_t>(p)];
        cs.insert(cs.begin() + static_cast<std::ptrdiff_t>(g), Segment{s});
        consider(std::move(cand), p);
      }
      for (std::size_t g = 0; g < segs.size(); ++g)
        for (std::size_t pos = 0; pos <= segs[g].size(); ++pos) {
          CrewPlan cand = crew;
          auto& seg = cand[static_cast<std::size_t>(p)][g];
          seg.insert(seg.begin() + static_cast<std::ptrdiff_t>(pos), s);
          consider(std::move(cand), p);
        }
    }
    return best;
  }

  static std::pair<int, std::size_t> locate(const CrewPlan& crew, int s) {
    for (std::size_t p = 0; p < crew.size(); ++p)
      for (std::size_t g = 0; g < crew[p].size(); ++g)
        if (std::find(crew[p][g].begin(), crew[p][g].end(), s) != crew[p][g].end()) return {static_cast<int>(p), g};
    throw Error("store not placed");
  }

  static CrewPlan without(CrewPlan crew, int s) {
    auto [p, g] = locate(crew, s);
    auto& segs = crew[static_cast<std::size_t>(p)];
    auto& seg = segs[g];
    seg.erase(std::find(seg.begin(), seg.end(), s));
    if (seg.empty()) segs.erase(segs.begin() + static_cast<std::ptrdiff_t>(g));
    return crew;
  }

  static std::size_t stores_of(const CrewPlan& crew, int p) {
    std::size_t c = 0;
    for (const auto& seg : crew[static_cast<std::size_t>(p)]) c += seg.size();
    return c;
  }

  static CrewPlan swapped(CrewPlan crew, int a, int b) {
    for (auto& segs : crew)
      for (auto& seg : segs)
        for (int& x : seg) x = x == a ? b : x == b ? a : x;
    return crew;
  }

  /// Greedy insertion in decreasing service time (heaviest ebar stores seed
  /// one pollster each), then relocate/swap passes on (makespan, sum of
  /// returns). Iteration-bounded and deterministic.
  CrewPlan build(int max_passes) const {
    std::vector<int> order(static_cast<std::size_t>(m_));
    for (int i = 0; i < m_; ++i) order[static_cast<std::size_t>(i)] = i + 1;
    std::stable_sort(order.begin(), order.end(),
                     [this](int a, int b) { return in_.service_time(a) > in_.service_time(b); });
    CrewPlan crew(static_cast<std::size_t>(ebar_));
    std::vector<Minutes> rets(static_cast<std::size_t>(kbar_));
    for (std::size_t r = 0; r < order.size(); ++r) {
      const int s = order[r];
      auto best = best_insertion(crew, rets, s, r < static_cast<std::size_t>(ebar_) ? std::optional<int>(static_cast<int>(r)) : std::nullopt);
      crew = std::move(best->second);
      rets = returns(crew);
    }
    Score cur = score(rets);
    for (int pass = 0; pass < max_passes; ++pass) {
      bool improved = false;
      for (int s = 1; s <= m_; ++s) {
        if (stores_of(crew, locate(crew, s).first) == 1) continue;
        const CrewPlan rest = without(crew, s);
        auto best = best_insertion(rest, returns(rest), s);
        if (best && best->first < cur) {
          crew = std::move(best->second);
          cur = best->first;
          improved = true;
        }
      }
      for (int a = 1; a <= m_; ++a)
        for (int b = a + 1; b <= m_; ++b) {
          CrewPlan cand = swapped(crew, a, b);
          const Score sc = score(returns(cand));
          if (sc < cur) {
            crew = std::move(cand);
            cur = sc;
            improved = true;
          }
        }
      if (!improved) break;
    }
    return crew;
  }

  DayPlan to_day(const CrewPlan& crew) const {
    DayPlan day;
    day.active = true;
    const int sink = 2 * m_ + 1;
    for (int v = 0; v < kbar_; ++v) {
      const VehicleRun run = simulate(crew, v);
      if (run.events.empty()) continue;
      VehicleRoute vr{v, 0, {0}};
      for (const VehicleEvent& e : run.events) vr.nodes.push_back(e.node);
      vr.nodes.push_back(sink);
      auto slice = [&vr](std::size_t from, std::size_t to) {
        return std::vector<int>(vr.nodes.begin() + static_cast<std::ptrdiff_t>(from),
                                vr.nodes.begin() + static_cast<std::ptrdiff_t>(to) + 1);
      };
      for (int p = v; p < ebar_; p += kbar_) {
        const auto& segs = crew[static_cast<std::size_t>(p)];
        if (segs.empty()) continue;
        ServiceRoute sr{p, 0, {}, std::nullopt};
        std::size_t board = 0, g = 0;
        for (std::size_t k = 0; k < run.events.size(); ++k) {
          const VehicleEvent& e = run.events[k];
          if (e.pollster != p) continue;
          if (e.drop) {
            sr.legs.push_back(Leg::ride(v, slice(board, k + 1)));
            std::vector<int> walk;
            for (int s : segs[g]) {
              walk.push_back(s);
              walk.push_back(s + m_);
            }
            sr.legs.push_back(Leg::walk(std::move(walk)));
            ++g;
          } else {
            board = k + 1;
          }
        }
        sr.legs.push_back(Leg::ride(v, slice(board, vr.nodes.size() - 1)));
        day.pollsters.push_back(std::move(sr));
      }
      day.vehicles.push_back(std::move(vr));
    }
    std::sort(day.pollsters.begin(), day.pollsters.end(),
              [](const ServiceRoute& a, const ServiceRoute& b) { return a.pollster < b.pollster; });
    return day;
  }

 private:
  const Instance& in_;
  int m_, kbar_, ebar_;
};

inline double reduced_cost(const Instance& inst, int vehicles, int pollsters) {
  return inst.costs.day + inst.costs.vehicle * vehicles + inst.costs.pollster * pollsters;
}

}  // namespace detail

/// Internal fallback for one subset. Resource pairs (k-bar, e-bar) are tried
/// in increasing hiring cost; the first whose construction fits the horizon
/// is returned.
inline SubsetOutcome solve_subset_fallback(const SubInstance& sub, int max_passes = 20) {
  const Instance& in = sub.inst;
  const Minutes H = in.b_max;
  for (int i = 1; i <= in.n; ++i) {
    const Minutes need = in.drive_time(0, i) + in.service_time(i) + in.drive_time(i + in.n, 2 * in.n + 1);
    if (need > H)
      return {std::nullopt, "store " + std::to_string(sub.stores[static_cast<std::size_t>(i - 1)]) + " needs " + need.str() +
                                " minutes round trip, half-shift is " + H.str()};
  }
  std::vector<std::pair<int, int>> cands;
  for (int e = 1; e <= std::min(in.num_pollsters, in.n); ++e)
    for (int k = 1; k <= std::min(in.num_vehicles, e); ++k)
      if (e <= in.capacity * k) cands.push_back({k, e});
  std::stable_sort(cands.begin(), cands.end(), [&in](auto a, auto b) {
    const double ca = detail::reduced_cost(in, a.first, a.second), cb = detail::reduced_cost(in, b.first, b.second);
    if (ca != cb) return ca < cb;
    return a < b;
  });
  const Minutes total = in.total_service();
  for (auto [k, e] : cands) {
    if (total > H * e) continue;
    detail::HalfShiftBuilder b(in, k, e);
    const detail::CrewPlan crew = b.build(max_passes);
    const auto rets = b.returns(crew);
    if (b.score(rets).makespan > H) continue;
    HalfShiftPlan hs;
    hs.stores = sub.stores;
    hs.day = b.to_day(crew);
    Plan p;
    p.days = {hs.day};
    const FeasibilityReport rep = check_plan(in, p, CheckOptions{false});
    if (!rep.ok) throw Error("fallback half-shift fails the checker: " + rep.violations.front().detail);
    const ResourceUsage u = plan_usage(p);
    hs.vehicles = u.vehicles;
    hs.pollsters = u.pollsters;
    hs.last_arrival = rep.schedule.day_return[0].value_or(Minutes{});
    hs.cost = detail::reduced_cost(in, hs.vehicles, hs.pollsters);
    hs.method = "fallback";
    return {hs, ""};
  }
  return {std::nullopt, "no resource pair fits the half-shift of " + H.str() + " minutes"};
}

/// Solves one subset with the external solver when configured (and a positive
/// budget is given), else with the internal fallback. A solver timeout without
/// an incumbent falls back as well.
inline SubsetOutcome solve_subset(const Instance& inst, const std::vector<int>& stores, double t_max_secs,
                                  const std::optional<SolverConfig>& cfg) {
  const SubInstance sub = half_shift_instance(inst, stores);
  std::string note;
  if (cfg && t_max_secs > 0) {
    ModelOptions mo;
    mo.reduced = true;
    mo.valid_inequalities = true;
    const MipModel model = build_model(sub.inst, mo);
    SolverConfig c = *cfg;
    c.time_limit = t_max_secs;
    try {
      const SolveResult r = solve_via_external(model, c);
      if (r.status == SolveStatus::Infeasible) return {std::nullopt, "solver: infeasible"};
      if (r.status != SolveStatus::Timeout || !r.values.empty()) {
        Plan p = parse_solution(model, r.values);
        const FeasibilityReport rep = check_plan(sub.inst, p, CheckOptions{false});
        if (!rep.ok) throw Error("solver plan fails the checker: " + rep.violations.front().detail);
        HalfShiftPlan hs;
        hs.stores = stores;
        hs.day = p.days[0];
        const ResourceUsage u = plan_usage(p);
        hs.vehicles = u.vehicles;
        hs.pollsters = u.pollsters;
        hs.last_arrival = rep.schedule.day_return[0].value_or(Minutes{});
        hs.cost = detail::reduced_cost(sub.inst, hs.vehicles, hs.pollsters);
        hs.method = std::string("solver-") + status_tag(r.status);
        return {hs, ""};
      }
      note = "solver timed out without a solution; ";
    } catch (const Error& e) {
      note = std::string("solver failed (") + e.what() + "); ";
    }
  }
  SubsetOutcome out = solve_subset_fallback(sub);
  if (!out.plan) out.reason = note + out.reason;
  return out;
}

// -- linking -------------------------------------------------------------------

struct LinkedPlan {
  Plan plan;
  std::vector<std::pair<int, int>> days;  // (morning, afternoon) half-shift index per day
  bool by_cost_order = false;             // true: resource vectors differ, pairs by descending cost
};

namespace detail {

inline int map_node(int x, int m, int n, const std::vector<int>& stores) {
  if (x == 0) return 0;
  if (x == 2 * m + 1) return 2 * n + 1;
  if (x <= m) return stores[static_cast<std::size_t>(x - 1)];
  return stores[static_cast<std::size_t>(x - m - 1)] + n;
}

inline void append_shift(DayPlan& day, const HalfShiftPlan& hs, int shift, int n) {
  const int m = static_cast<int>(hs.stores.size());
  auto remap = [&](std::vector<int> v) {
    for (int& x : v) x = map_node(x, m, n, hs.stores);
    return v;
  };
  for (const VehicleRoute& r : hs.day.vehicles) day.vehicles.push_back({r.vehicle, shift, remap(r.nodes)});
  for (const ServiceRoute& r : hs.day.pollsters) {
    ServiceRoute out{r.pollster, shift, {}, std::nullopt};
    for (const Leg& leg : r.legs) out.legs.push_back({leg.kind, leg.vehicle, remap(leg.nodes)});
    day.pollsters.push_back(std::move(out));
  }
}

}  // namespace detail

/// Pairs half-shifts into split days. Differing resource vectors: sort by
/// cost descending and pair neighbours. Equal vectors: minimum-weight perfect
/// matching on the sum of last depot arrivals. The earlier finisher of each
/// pair works the afternoon.
inline LinkedPlan link_partitions(const Instance& inst, const std::vector<HalfShiftPlan>& hs) {
  if (hs.size() % 2 != 0) throw Error("linking needs an even number of half-shifts, got " + std::to_string(hs.size()));
  LinkedPlan out;
  Pairing pairs;
  const auto k = hs.size();
  bool differ = false;
  for (std::size_t i = 1; i < k; ++i)
    differ |= hs[i].vehicles != hs[0].vehicles || hs[i].pollsters != hs[0].pollsters;
  out.by_cost_order = differ;
  if (differ) {
    std::vector<int> order(k);
    for (std::size_t i = 0; i < k; ++i) order[i] = static_cast<int>(i);
    std::stable_sort(order.begin(), order.end(), [&hs](int a, int b) {
      return hs[static_cast<std::size_t>(a)].cost > hs[static_cast<std::size_t>(b)].cost;
    });
    for (std::size_t i = 0; i + 1 < k; i += 2) pairs.push_back({order[i], order[i + 1]});
  } else {
    std::vector<std::vector<double>> w(k, std::vector<double>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = 0; j < k; ++j)
        if (i != j) w[i][j] = static_cast<double>((hs[i].last_arrival + hs[j].last_arrival).centi());
    pairs = min_cost_perfect_matching(w);
  }
  if (static_cast<int>(pairs.size()) > inst.num_days)
    throw Error("linking needs " + std::to_string(pairs.size()) + " days, only " + std::to_string(inst.num_days) + " available");
  out.plan.days.assign(static_cast<std::size_t>(inst.num_days), DayPlan{});
  for (std::size_t d = 0; d < pairs.size(); ++d) {
    auto [a, b] = pairs[d];
    const auto& A = hs[static_cast<std::size_t>(a)];
    const auto& B = hs[static_cast<std::size_t>(b)];
    int morning = a, afternoon = b;
    if (A.last_arrival < B.last_arrival || (A.last_arrival == B.last_arrival && a > b)) std::swap(morning, afternoon);
    DayPlan& day = out.plan.days[d];
    day.active = true;
    day.split = true;
    detail::append_shift(day, hs[static_cast<std::size_t>(morning)], 0, inst.n);
    detail::append_shift(day, hs[static_cast<std::size_t>(afternoon)], 1, inst.n);
    out.days.push_back({morning, afternoon});
  }
  return out;
}

// -- three-phase driver ------------------------------------------------------------

/// Smallest even k with k >= total service / (pollsters x working time), at least 2.
inline int k_start_default(const Instance& inst) {
  const std::int64_t per_day = static_cast<std::int64_t>(inst.num_pollsters) * (inst.b_max - inst.pause).centi();
  const std::int64_t total = inst.total_service().centi();
  std::int64_t k = per_day > 0 ? (total + per_day - 1) / per_day : 2;
  if (k % 2 != 0) ++k;
  return static_cast<int>(std::max<std::int64_t>(2, k));
}

struct HeuristicParams {
  std::optional<int> k_start;
  int n_max = 5000;
  double t_max_secs = 60;
  std::uint64_t seed = 1;
  int threads = 1;
};

struct SubsetReport {
  int subset = 0;
  int size = 0;
  bool feasible = false;
  int vehicles = 0;
  int pollsters = 0;
  double cost = 0;
  Minutes last_arrival;
  std::string method;
  std::string reason;
};

struct Attempt {
  int k = 0;
  double partition_objective = 0;
  bool partition_monotone = true;
  int min_size = 0, max_size = 0;
  std::vector<double> history;
  std::vector<SubsetReport> subsets;  // up to and including the first failure
  bool feasible = false;
  std::string reason;
};

struct HeuristicResult {
  bool ok = false;
  Plan plan;
  double cost = 0;
  ResourceUsage usage;
  std::optional<double> lower_bound;
  std::optional<double> gap;
  std::vector<Attempt> attempts;
  std::vector<HalfShiftPlan> half_shifts;
  std::vector<std::pair<int, int>> day_pairs;
  bool by_cost_order = false;
  std::string failure;
};

inline void check_params(const Instance& inst, const HeuristicParams& p) {
  if (p.k_start && (*p.k_start < 2 || *p.k_start % 2 != 0)) throw Error("k_start must be even and >= 2");
  if (p.n_max < 0) throw Error("partition iterations must be >= 0");
  if (p.t_max_secs < 0) throw Error("per-subset budget must be >= 0");
  if (p.threads < 1) throw Error("threads must be >= 1");
  (void)inst;
}

namespace detail {

inline std::vector<SubsetOutcome> solve_all(const Instance& inst, const Partition& part, const HeuristicParams& params,
                                            const std::optional<SolverConfig>& cfg) {
  const std::size_t k = part.subsets.size();
  std::vector<SubsetOutcome> out(k);
  if (params.threads <= 1) {
    for (std::size_t j = 0; j < k; ++j) {
      out[j] = solve_subset(inst, part.subsets[j], params.t_max_secs, cfg);
      if (!out[j].plan) break;
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::vector<std::string> errors(k);
  auto worker = [&]() {
    for (std::size_t j = next++; j < k; j = next++) {
      try {
        out[j] = solve_subset(inst, part.subsets[j], params.t_max_secs, cfg);
      } catch (const std::exception& e) {
        errors[j] = e.what();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const auto n = std::min<std::size_t>(static_cast<std::size_t>(params.threads), k);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failed)
    for (const auto& e : errors)
      if (!e.empty()) throw Error(e);
  return out;
}

}  // namespace detail

/// Partition, solve every subset over a half-shift, link into split days; on
/// any failure restart with k + 2 while k + 2 <= 2|S|.
inline HeuristicResult run_three_phase(const Instance& inst, const HeuristicParams& params,
                                       const std::optional<SolverConfig>& cfg = std::nullopt) {
  check_params(inst, params);
  HeuristicResult res;
  const LowerBoundResult lb = lower_bound_resources(inst);
  if (!lb.bound) {
    res.failure = "lower bound certificate: " + lb.certificate;
    return res;
  }
  res.lower_bound = lb.bound->cost;
  int k = params.k_start.value_or(k_start_default(inst));
  while (true) {
    if (k > 2 * inst.num_days) {
      res.failure = "k=" + std::to_string(k) + " exceeds 2|S|=" + std::to_string(2 * inst.num_days);
      break;
    }
    if (k > inst.n) {
      res.failure = "k=" + std::to_string(k) + " exceeds the number of stores " + std::to_string(inst.n);
      break;
    }
    Attempt at;
    at.k = k;
    const Partition part = partition_stores(inst, k, params.n_max, params.seed);
    at.partition_objective = part.objective;
    at.history = part.history;
    at.partition_monotone = std::is_sorted(part.history.rbegin(), part.history.rend());
    at.min_size = static_cast<int>(inst.n);
    for (const auto& g : part.subsets) {
      at.min_size = std::min(at.min_size, static_cast<int>(g.size()));
      at.max_size = std::max(at.max_size, static_cast<int>(g.size()));
    }
    const auto outcomes = detail::solve_all(inst, part, params, cfg);
    std::vector<HalfShiftPlan> hs;
    bool all = true;
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
      SubsetReport r;
      r.subset = static_cast<int>(j);
      r.size = static_cast<int>(part.subsets[j].size());
      if (outcomes[j].plan) {
        HalfShiftPlan p = *outcomes[j].plan;
        p.subset = static_cast<int>(j);
        r.feasible = true;
        r.vehicles = p.vehicles;
        r.pollsters = p.pollsters;
        r.cost = p.cost;
        r.last_arrival = p.last_arrival;
        r.method = p.method;
        hs.push_back(std::move(p));
        at.subsets.push_back(r);
      } else {
        r.reason = outcomes[j].reason;
        at.subsets.push_back(r);
        at.reason = "subset " + std::to_string(j) + " infeasible: " + r.reason;
        all = false;
        break;
      }
    }
    if (all) {
      LinkedPlan linked = link_partitions(inst, hs);
      const FeasibilityReport rep = check_plan(inst, linked.plan);
      if (rep.ok) {
        at.feasible = true;
        res.attempts.push_back(std::move(at));
        res.ok = true;
        linked.plan.schedule = rep.schedule;
        res.plan = std::move(linked.plan);
        res.day_pairs = std::move(linked.days);
        res.by_cost_order = linked.by_cost_order;
        res.half_shifts = std::move(hs);
        res.usage = plan_usage(res.plan);
        res.cost = plan_cost(inst, res.plan);
        if (res.cost > 0) res.gap = (res.cost - *res.lower_bound) / res.cost;
        return res;
      }
      at.reason = std::string("linked plan fails the checker (") + family_tag(rep.violations.front().family) +
                  "): " + rep.violations.front().detail;
    }
    res.attempts.push_back(std::move(at));
    if (k + 2 > 2 * inst.num_days) {
      res.failure = "no feasible partition up to k=" + std::to_string(k) + " (2|S|=" + std::to_string(2 * inst.num_days) +
                    ")";
      break;
    }
    k += 2;
  }
  return res;
}

// -- variable fixing -------------------------------------------------------------

struct FixStep {
  int subset = 0;
  int fixed = 0;  // total variables pinned in this solve
  SolveStatus status = SolveStatus::Infeasible;
  bool kept = false;
};

struct FixResult {
  bool ok = false;
  Plan plan;
  double cost = 0;
  std::optional<double> gap;
  std::vector<FixStep> steps;
  HeuristicResult base;
  std::string failure;
};

/// Pins the arcs of one linked half-shift in the full model: the day of its
/// pair, pollster and vehicle labels offset past the morning crew, only arcs
/// with both ends inside the subset (depot arcs stay free).
inline std::map<std::string, double> half_shift_fixings(const Instance& inst, const MipModel& model,
                                                        const HeuristicResult& h, int subset) {
  int day = -1, e_off = 0, k_off = 0;
  for (std::size_t d = 0; d < h.day_pairs.size(); ++d) {
    const auto [mo, af] = h.day_pairs[d];
    if (mo == subset) day = static_cast<int>(d);
    if (af == subset) {
      day = static_cast<int>(d);
      e_off = h.half_shifts[static_cast<std::size_t>(mo)].pollsters;
      k_off = h.half_shifts[static_cast<std::size_t>(mo)].vehicles;
    }
  }
  if (day < 0) throw Error("subset " + std::to_string(subset) + " is not linked to a day");
  const HalfShiftPlan& hs = h.half_shifts[static_cast<std::size_t>(subset)];
  const int n = inst.n, m = static_cast<int>(hs.stores.size());
  std::set<int> nodes;
  for (int s : hs.stores) {
    nodes.insert(s);
    nodes.insert(s + n);
  }
  std::set<int> pollsters, vehicles;
  std::set<std::string> ones;
  auto node = [&](int x) { return detail::map_node(x, m, n, hs.stores); };
  auto inside = [&nodes](int a, int b) { return nodes.count(a) && nodes.count(b); };
  for (const VehicleRoute& r : hs.day.vehicles) {
    const int k = r.vehicle + k_off;
    if (k >= inst.num_vehicles) continue;
    vehicles.insert(k);
    for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) {
      const int a = node(r.nodes[i]), b = node(r.nodes[i + 1]);
      if (inside(a, b)) ones.insert(names::y(a, b, k, day));
    }
  }
  for (const ServiceRoute& r : hs.day.pollsters) {
    const int e = r.pollster + e_off;
    if (e >= inst.num_pollsters) continue;
    pollsters.insert(e);
    for (const Leg& leg : r.legs) {
      for (std::size_t i = 0; i + 1 < leg.nodes.size(); ++i) {
        const int a = node(leg.nodes[i]), b = node(leg.nodes[i + 1]);
        if (inside(a, b)) ones.insert(leg.kind == LegKind::Walk ? names::x(a, b, e, day) : names::z(a, b, e, day));
      }
      if (leg.kind == LegKind::Walk) {
        ones.insert(names::b(node(leg.nodes.front()), e, day));
        ones.insert(names::f(node(leg.nodes.back()), e, day));
      }
    }
  }
  std::map<std::string, double> fixed;
  for (const Variable& v : model.variables) {
    const char kind = v.name[0];
    if (v.name.size() < 2 || v.name[1] != '_' || std::string("xyzbf").find(kind) == std::string::npos) continue;
    const std::vector<int> idx = detail::parse_indices(v.name);
    if (idx.back() != day) continue;
    const int who = idx[idx.size() - 2];
    if (kind == 'y' ? !vehicles.count(who) : !pollsters.count(who)) continue;
    const bool arc = kind == 'x' || kind == 'y' || kind == 'z';
    if (arc ? !inside(idx[0], idx[1]) : !nodes.count(idx[0])) continue;
    fixed[v.name] = ones.count(v.name) ? 1.0 : 0.0;
  }
  return fixed;
}

/// Runs the three-phase heuristic, then solves the full model with the
/// half-shift arcs pinned subset by subset: a timeout keeps the fixings and
/// adds the next subset; an infeasible solve drops that subset's fixings.
inline FixResult fix_heuristic(const Instance& inst, const HeuristicParams& params, const SolverConfig& cfg,
                               const std::optional<SolverConfig>& subset_cfg = std::nullopt) {
  FixResult res;
  res.base = run_three_phase(inst, params, subset_cfg);
  if (!res.base.ok) {
    res.failure = "three-phase heuristic failed: " + res.base.failure;
    return res;
  }
  ModelOptions mo;
  mo.lower_bound_cuts = true;
  const MipModel model = build_model(inst, mo);
  std::map<std::string, double> fixed;
  for (std::size_t d = 0; d < res.base.day_pairs.size(); ++d) {
    for (int j : {res.base.day_pairs[d].first, res.base.day_pairs[d].second}) {
      const auto add = half_shift_fixings(inst, model, res.base, j);
      std::map<std::string, double> trial = fixed;
      trial.insert(add.begin(), add.end());
      const SolveResult r = fix_and_resolve(model, trial, cfg);
      FixStep step{j, static_cast<int>(trial.size()), r.status, false};
      if (r.status == SolveStatus::Optimal || r.status == SolveStatus::Feasible) {
        Plan p = parse_solution(model, r.values);
        const FeasibilityReport rep = check_plan(inst, p);
        if (!rep.ok) throw Error("fixed-model plan fails the checker: " + rep.violations.front().detail);
        step.kept = true;
        res.steps.push_back(step);
        p.schedule = rep.schedule;
        res.ok = true;
        res.plan = std::move(p);
        res.cost = plan_cost(inst, res.plan);
        if (res.base.lower_bound && res.cost > 0) res.gap = (res.cost - *res.base.lower_bound) / res.cost;
        return res;
      }
      if (r.status == SolveStatus::Timeout) {
        fixed = std::move(trial);
        step.kept = true;
      }
      res.steps.push_back(step);
    }
  }
  res.failure = "no fixing round produced a solution";
  return res;
}

// -- JSON ----------------------------------------------------------------------

inline Json to_json(const SubsetReport& r) {
  Json j{{"subset", r.subset}, {"size", r.size}, {"feasible", r.feasible}};
  if (r.feasible) {
    j["vehicles"] = r.vehicles;
    j["pollsters"] = r.pollsters;
    j["cost"] = r.cost;
    j["last_arrival"] = r.last_arrival.value();
    j["method"] = r.method;
  } else {
    j["reason"] = r.reason;
  }
  return j;
}

inline Json to_json(const Attempt& a) {
  Json subs = Json::array();
  for (const auto& s : a.subsets) subs.push_back(to_json(s));
  Json j{{"k", a.k},
         {"partition_objective", a.partition_objective},
         {"partition_monotone", a.partition_monotone},
         {"min_size", a.min_size},
         {"max_size", a.max_size},
         {"feasible", a.feasible},
         {"subsets", subs}};
  if (!a.reason.empty()) j["reason"] = a.reason;
  return j;
}

inline Json to_json(const HeuristicResult& r) {
  Json attempts = Json::array();
  for (const auto& a : r.attempts) attempts.push_back(to_json(a));
  Json j{{"strategy", "heuristic"}, {"ok", r.ok}, {"attempts", attempts}};
  if (r.lower_bound) j["lower_bound"] = *r.lower_bound;
  if (r.ok) {
    j["objective"] = r.cost;
    j["usage"] = {{"days", r.usage.days}, {"vehicles", r.usage.vehicles}, {"pollsters", r.usage.pollsters}};
    if (r.gap) j["gap"] = *r.gap;
    Json pairs = Json::array();
    for (auto [a, b] : r.day_pairs) pairs.push_back({a, b});
    j["day_pairs"] = pairs;
    j["linking"] = r.by_cost_order ? "cost-order" : "matching";
    j["plan"] = to_json(r.plan);
  } else {
    j["failure"] = r.failure;
  }
  return j;
}

inline Json to_json(const FixResult& r) {
  Json steps = Json::array();
  for (const auto& s : r.steps)
    steps.push_back({{"subset", s.subset}, {"fixed", s.fixed}, {"status", status_tag(s.status)}, {"kept", s.kept}});
  Json j{{"strategy", "fix-heuristic"}, {"ok", r.ok}, {"steps", steps}, {"heuristic", to_json(r.base)}};
  if (r.ok) {
    const ResourceUsage u = plan_usage(r.plan);
    j["objective"] = r.cost;
    j["usage"] = {{"days", u.days}, {"vehicles", u.vehicles}, {"pollsters", u.pollsters}};
    if (r.gap) j["gap"] = *r.gap;
    j["plan"] = to_json(r.plan);
  } else {
    j["failure"] = r.failure;
  }
  return j;
}

}  // namespace ivprp
