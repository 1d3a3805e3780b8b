#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "ivprp/bounds.hpp"
#include "ivprp/instance.hpp"
#include "ivprp/plan.hpp"

namespace ivprp {

struct ExactLimits {
  int max_n = 6;
  std::optional<double> budget_secs;
  std::optional<std::int64_t> node_budget;
};

enum class ExactStatus { Optimal, Infeasible, BudgetExceeded };

inline const char* status_tag(ExactStatus s) {
  switch (s) {
    case ExactStatus::Optimal: return "optimal";
    case ExactStatus::Infeasible: return "infeasible";
    case ExactStatus::BudgetExceeded: return "budget-exceeded";
  }
  return "?";
}

struct ExactResult {
  ExactStatus status = ExactStatus::Infeasible;
  std::optional<Plan> plan;  // incumbent when the budget ran out
  double cost = 0;
  ResourceTriple counts;  // active days, vehicle-days, pollster-days
  std::int64_t nodes = 0;
};

namespace detail {

/// Budget shared by every search started from one call.
class SearchBudget {
 public:
  explicit SearchBudget(const ExactLimits& lim) : lim_(lim), start_(std::chrono::steady_clock::now()) {}
  bool tick() {
    ++nodes_;
    if (exhausted_) return false;
    if (lim_.node_budget && nodes_ > *lim_.node_budget) exhausted_ = true;
    if (lim_.budget_secs && (nodes_ & 1023) == 0) {
      const std::chrono::duration<double> el = std::chrono::steady_clock::now() - start_;
      if (el.count() > *lim_.budget_secs) exhausted_ = true;
    }
    return !exhausted_;
  }
  bool exhausted() const { return exhausted_; }
  std::int64_t nodes() const { return nodes_; }

 private:
  ExactLimits lim_;
  std::chrono::steady_clock::time_point start_;
  std::int64_t nodes_ = 0;
  bool exhausted_ = false;
};

/// Event-ordered depth-first search for one day: fixed store set, fixed
/// numbers of vehicles and pollsters. Vehicle events are generated in
/// nondecreasing (time, vehicle) order, every time is the earliest one the
/// chosen structure allows, and failed states are memoized.
class DaySearch {
 public:
  DaySearch(const Instance& inst, std::uint32_t stores, int vehicles, int pollsters, SearchBudget& budget)
      : inst_(inst), n_(inst.n), target_(stores), k_(vehicles), e_(pollsters), budget_(budget) {
    min_out_.assign(static_cast<std::size_t>(2 * n_ + 2), Minutes::max());
    for (int a = 0; a <= 2 * n_; ++a)
      for (int b = 1; b <= 2 * n_ + 1; ++b)
        if (is_vehicular_arc(n_, a, b))
          min_out_[static_cast<std::size_t>(a)] = std::min(min_out_[static_cast<std::size_t>(a)], inst.drive_time(a, b));
  }

  /// First feasible day plan, if any.
  std::optional<DayPlan> find() {
    std::optional<DayPlan> out;
    run([&](const DayPlan& d) {
      out = d;
      return true;
    });
    return out;
  }

  /// Calls `sink` for every feasible day plan (up to vehicle symmetry) until it returns true.
  void run(const std::function<bool(const DayPlan&)>& sink) {
    sink_ = &sink;
    std::vector<int> parts;
    enumerate_loads(parts, e_);
  }

  bool aborted() const { return budget_.exhausted(); }

 private:
  enum class Where : std::uint8_t { Riding, Walking, Home };

  struct Vehicle {
    int pos = 0;
    Minutes clock;
    std::uint32_t riders = 0;
    bool started = false;
    bool returned = false;
  };
  struct Pollster {
    Where where = Where::Riding;
    int vehicle = 0;
    int end = 0;  // departure node where the current walk finishes
    Minutes ready;
    bool rested = false;
  };
  struct Trail {
    std::vector<VehicleRoute> vehicles;
    std::vector<ServiceRoute> pollsters;
  };
  struct State {
    std::uint32_t served = 0;
    std::vector<Vehicle> veh;
    std::vector<Pollster> pol;
    Minutes last_time;
    int last_vehicle = 0;
    Trail trail;
  };

  const Instance& inst_;
  int n_;
  std::uint32_t target_;
  int k_, e_;
  SearchBudget& budget_;
  std::vector<Minutes> min_out_;
  std::unordered_set<std::string> dead_;
  const std::function<bool(const DayPlan&)>* sink_ = nullptr;
  bool stop_ = false;

  static std::uint32_t bit(int store) { return 1u << (store - 1); }

  bool enumerate_loads(std::vector<int>& parts, int left) {
    const int slots = k_ - static_cast<int>(parts.size());
    if (slots == 0) {
      if (left == 0) start(parts);
      return stop_;
    }
    const int hi = std::min({inst_.capacity, left - (slots - 1), parts.empty() ? inst_.capacity : parts.back()});
    for (int load = hi; load >= 1 && !stop_; --load) {
      if (load * slots < left) break;
      parts.push_back(load);
      enumerate_loads(parts, left - load);
      parts.pop_back();
    }
    return stop_;
  }

  void start(const std::vector<int>& loads) {
    State s;
    s.veh.resize(static_cast<std::size_t>(k_));
    s.pol.resize(static_cast<std::size_t>(e_));
    s.trail.vehicles.resize(static_cast<std::size_t>(k_));
    s.trail.pollsters.resize(static_cast<std::size_t>(e_));
    int p = 0;
    for (int v = 0; v < k_; ++v) {
      s.trail.vehicles[static_cast<std::size_t>(v)] = {v, 0, {0}};
      for (int c = 0; c < loads[static_cast<std::size_t>(v)]; ++c, ++p) {
        s.veh[static_cast<std::size_t>(v)].riders |= 1u << p;
        s.pol[static_cast<std::size_t>(p)] = {Where::Riding, v, 0, Minutes{}, false};
        s.trail.pollsters[static_cast<std::size_t>(p)] = {p, 0, {Leg::ride(v, {0})}, std::nullopt};
      }
    }
    dfs(s);
  }

  std::string key(const State& s) const {
    std::string k;
    auto put = [&k](std::int64_t v) {
      k.append(reinterpret_cast<const char*>(&v), sizeof v);
    };
    put(s.served);
    put(s.last_time.centi());
    put(s.last_vehicle);
    for (const Vehicle& v : s.veh) {
      put(v.pos);
      put(v.clock.centi());
      put(v.riders);
      put(static_cast<std::int64_t>(v.started) | static_cast<std::int64_t>(v.returned) << 1);
    }
    for (const Pollster& p : s.pol) {
      put(static_cast<std::int64_t>(p.where) | static_cast<std::int64_t>(p.rested) << 2);
      put(p.end);
      put(p.ready.centi());
    }
    return k;
  }

  bool in_order(const State& s, Minutes t, int v) const {
    return t > s.last_time || (t == s.last_time && v >= s.last_vehicle);
  }

  void move_vehicle(State& s, int v, int to, Minutes at) {
    Vehicle& veh = s.veh[static_cast<std::size_t>(v)];
    veh.pos = to;
    veh.clock = at;
    veh.started = true;
    s.last_time = at;
    s.last_vehicle = v;
    s.trail.vehicles[static_cast<std::size_t>(v)].nodes.push_back(to);
    for (int p = 0; p < e_; ++p)
      if (veh.riders >> p & 1u) s.trail.pollsters[static_cast<std::size_t>(p)].legs.back().nodes.push_back(to);
  }

  // returns true when the subtree holds a feasible plan
  bool dfs(State& s) {
    if (stop_ || !budget_.tick()) return false;
    bool all_home = true;
    for (const Pollster& p : s.pol) all_home &= p.where == Where::Home;
    for (const Vehicle& v : s.veh) all_home &= v.returned;
    if (all_home) {
      if (s.served != target_) return false;
      DayPlan d;
      d.active = true;
      d.vehicles = s.trail.vehicles;
      d.pollsters = s.trail.pollsters;
      if ((*sink_)(d)) stop_ = true;
      return true;
    }
    std::string k = key(s);
    if (dead_.count(k)) return false;
    bool found = false;
    for (int v = 0; v < k_ && !stop_; ++v) {
      const Vehicle& veh = s.veh[static_cast<std::size_t>(v)];
      if (veh.returned) continue;
      if (!veh.started) {
        bool twin = false;
        for (int u = 0; u < v; ++u) {
          const Vehicle& o = s.veh[static_cast<std::size_t>(u)];
          twin |= !o.started && std::popcount(o.riders) == std::popcount(veh.riders);
        }
        if (twin) continue;
      }
      found |= drops(s, v);
      found |= pickups(s, v);
      found |= go_home(s, v);
    }
    if (!found && !budget_.exhausted()) dead_.insert(std::move(k));
    return found;
  }

  bool drops(const State& s, int v) {
    const Vehicle& veh = s.veh[static_cast<std::size_t>(v)];
    if (veh.riders == 0) return false;
    bool found = false;
    // one representative per interchangeable rider class
    int pick[2] = {-1, -1};
    for (int p = 0; p < e_; ++p)
      if (veh.riders >> p & 1u) {
        int& slot = pick[s.pol[static_cast<std::size_t>(p)].rested ? 1 : 0];
        if (slot < 0) slot = p;
      }
    for (int i = 1; i <= n_ && !stop_; ++i) {
      if (!(target_ & bit(i)) || (s.served & bit(i))) continue;
      if (!is_vehicular_arc(n_, veh.pos, i)) continue;
      const Minutes arrive = veh.clock + inst_.drive_time(veh.pos, i);
      for (int p : pick) {
        if (p < 0 || stop_) continue;
        std::vector<int> path{i};
        found |= extend_walk(s, v, p, arrive, path, s.served | bit(i));
      }
    }
    return found;
  }

  // Tries the walk `path` as is and every extension of it.
  bool extend_walk(const State& s, int v, int p, Minutes arrive, std::vector<int>& path, std::uint32_t claimed) {
    bool found = try_walk(s, v, p, arrive, path, claimed);
    for (int j = 1; j <= n_ && !stop_; ++j) {
      if (!(target_ & bit(j)) || (claimed & bit(j))) continue;
      path.push_back(j);
      found |= extend_walk(s, v, p, arrive, path, claimed | bit(j));
      path.pop_back();
    }
    return found;
  }

  bool try_walk(const State& s, int v, int p, Minutes arrive, const std::vector<int>& path, std::uint32_t claimed) {
    const bool rested = s.pol[static_cast<std::size_t>(p)].rested;
    bool found = false;
    // -1: no break on this walk
    for (int br = rested ? -1 : static_cast<int>(path.size()) - 1; br >= -1 && !stop_; --br) {
      std::vector<Minutes> times;
      Minutes now = arrive;
      bool ok = true;
      for (std::size_t q = 0; q < path.size() && ok; ++q) {
        const int st = path[q];
        if (q > 0) now = now + inst_.walk_time(path[q - 1] + n_, st);
        const Minutes t = inst_.service_time(st);
        if (static_cast<int>(q) == br) {
          now = std::max(now, inst_.t0 - t);
          if (now + t > inst_.t1) ok = false;
        }
        times.push_back(now);
        now = now + t + (static_cast<int>(q) == br ? inst_.pause : Minutes{});
      }
      if (!ok) continue;
      const int end = path.back() + n_;
      if (now + min_out_[static_cast<std::size_t>(end)] > inst_.b_max) continue;
      if (times.front() + min_out_[static_cast<std::size_t>(path.front())] > inst_.b_max) continue;
      if (!in_order(s, times.front(), v)) continue;
      if (br == -1 && !rested && now > inst_.t1) continue;  // the break could never fit afterwards

      State nx = s;
      move_vehicle(nx, v, path.front(), times.front());
      nx.veh[static_cast<std::size_t>(v)].riders &= ~(1u << p);
      Pollster& pol = nx.pol[static_cast<std::size_t>(p)];
      pol.where = Where::Walking;
      pol.end = end;
      pol.ready = now;
      if (br >= 0) pol.rested = true;
      ServiceRoute& route = nx.trail.pollsters[static_cast<std::size_t>(p)];
      Leg walk = Leg::walk({});
      for (int st : path) {
        walk.nodes.push_back(st);
        walk.nodes.push_back(st + n_);
      }
      route.legs.push_back(std::move(walk));
      if (br >= 0) route.break_store = path[static_cast<std::size_t>(br)];
      nx.served = claimed;
      found |= dfs(nx);
    }
    return found;
  }

  bool pickups(const State& s, int v) {
    const Vehicle& veh = s.veh[static_cast<std::size_t>(v)];
    if (!veh.started || std::popcount(veh.riders) >= inst_.capacity) return false;
    bool found = false;
    for (int p = 0; p < e_ && !stop_; ++p) {
      const Pollster& pol = s.pol[static_cast<std::size_t>(p)];
      if (pol.where != Where::Walking || !is_vehicular_arc(n_, veh.pos, pol.end)) continue;
      const Minutes at = std::max(veh.clock + inst_.drive_time(veh.pos, pol.end), pol.ready);
      if (at + min_out_[static_cast<std::size_t>(pol.end)] > inst_.b_max) continue;
      if (!pol.rested && at > inst_.t1) continue;
      if (!in_order(s, at, v)) continue;
      State nx = s;
      move_vehicle(nx, v, pol.end, at);
      nx.veh[static_cast<std::size_t>(v)].riders |= 1u << p;
      Pollster& np = nx.pol[static_cast<std::size_t>(p)];
      np.where = Where::Riding;
      np.vehicle = v;
      nx.trail.pollsters[static_cast<std::size_t>(p)].legs.push_back(Leg::ride(v, {pol.end}));
      found |= dfs(nx);
    }
    return found;
  }

  bool go_home(const State& s, int v) {
    const Vehicle& veh = s.veh[static_cast<std::size_t>(v)];
    if (!inst_.is_departure(veh.pos)) return false;
    for (int p = 0; p < e_; ++p)
      if ((veh.riders >> p & 1u) && !s.pol[static_cast<std::size_t>(p)].rested) return false;
    const int sink = 2 * n_ + 1;
    const Minutes at = veh.clock + inst_.drive_time(veh.pos, sink);
    if (at > inst_.b_max || !in_order(s, at, v)) return false;
    State nx = s;
    const std::uint32_t riders = veh.riders;
    move_vehicle(nx, v, sink, at);
    nx.veh[static_cast<std::size_t>(v)].returned = true;
    nx.veh[static_cast<std::size_t>(v)].riders = 0;
    for (int p = 0; p < e_; ++p)
      if (riders >> p & 1u) nx.pol[static_cast<std::size_t>(p)].where = Where::Home;
    return dfs(nx);
  }
};

inline double day_cost(const Instance& inst, int vehicles, int pollsters) {
  return inst.costs.day + inst.costs.vehicle * vehicles + inst.costs.pollster * pollsters;
}

/// (vehicles, pollsters) pairs that can possibly serve `stores` in one day, cheapest first.
inline std::vector<std::pair<int, int>> day_candidates(const Instance& inst, std::uint32_t stores) {
  Minutes total;
  int count = 0;
  for (int i = 1; i <= inst.n; ++i)
    if (stores >> (i - 1) & 1u) {
      total += inst.service_time(i);
      ++count;
    }
  const Minutes shift = inst.b_max - inst.pause;
  std::vector<std::pair<int, int>> out;
  if (shift <= Minutes{}) return out;
  const int min_e = static_cast<int>(std::max<std::int64_t>(1, ceil_div(total.centi(), shift.centi())));
  for (int k = 1; k <= inst.num_vehicles; ++k)
    for (int e = std::max(k, min_e); e <= std::min({inst.num_pollsters, count, inst.capacity * k}); ++e) out.push_back({k, e});
  std::stable_sort(out.begin(), out.end(), [&](auto a, auto b) {
    return day_cost(inst, a.first, a.second) < day_cost(inst, b.first, b.second);
  });
  return out;
}

struct DayOption {
  int vehicles = 0;
  int pollsters = 0;
  DayPlan plan;
};

}  // namespace detail

/// Exact minimum-cost plan by search over day store sets, day resources and
/// event-ordered routes. Intended for n up to about 6.
inline ExactResult solve_exact(const Instance& inst, const ExactLimits& limits = {}) {
  if (inst.n > limits.max_n)
    throw Error("exact search limited to " + std::to_string(limits.max_n) + " stores, instance has " + std::to_string(inst.n));
  if (inst.n > 30) throw Error("exact search needs n <= 30");
  detail::SearchBudget budget(limits);
  const int n = inst.n;
  const std::uint32_t full = (1u << n) - 1;

  std::vector<std::optional<detail::DayOption>> best(static_cast<std::size_t>(full) + 1);
  for (std::uint32_t mask = 1; mask <= full && !budget.exhausted(); ++mask) {
    for (auto [k, e] : detail::day_candidates(inst, mask)) {
      detail::DaySearch search(inst, mask, k, e, budget);
      auto day = search.find();
      if (search.aborted()) break;
      if (day) {
        best[mask] = detail::DayOption{k, e, std::move(*day)};
        break;
      }
    }
  }

  // cheapest split of the stores into at most |S| day sets
  const double inf = std::numeric_limits<double>::infinity();
  const int S = inst.num_days;
  std::vector<std::vector<double>> f(static_cast<std::size_t>(S) + 1, std::vector<double>(static_cast<std::size_t>(full) + 1, inf));
  std::vector<std::vector<std::uint32_t>> choice(f.size(), std::vector<std::uint32_t>(f[0].size(), 0));
  f[0][0] = 0;
  for (int d = 1; d <= S; ++d)
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const std::uint32_t low = mask & (~mask + 1);
      for (std::uint32_t sub = mask; sub; sub = (sub - 1) & mask) {
        if (!(sub & low) || !best[sub]) continue;
        const double prev = f[static_cast<std::size_t>(d - 1)][mask ^ sub];
        if (prev == inf) continue;
        const double c = prev + detail::day_cost(inst, best[sub]->vehicles, best[sub]->pollsters);
        if (c < f[static_cast<std::size_t>(d)][mask]) {
          f[static_cast<std::size_t>(d)][mask] = c;
          choice[static_cast<std::size_t>(d)][mask] = sub;
        }
      }
    }
  int best_d = -1;
  for (int d = 1; d <= S; ++d)
    if (f[static_cast<std::size_t>(d)][full] < inf && (best_d < 0 || f[static_cast<std::size_t>(d)][full] < f[static_cast<std::size_t>(best_d)][full]))
      best_d = d;

  ExactResult res;
  res.nodes = budget.nodes();
  if (best_d < 0) {
    res.status = budget.exhausted() ? ExactStatus::BudgetExceeded : ExactStatus::Infeasible;
    return res;
  }
  Plan plan;
  std::uint32_t mask = full;
  for (int d = best_d; d >= 1; --d) {
    const std::uint32_t sub = choice[static_cast<std::size_t>(d)][mask];
    plan.days.push_back(best[sub]->plan);
    res.counts.vehicles += best[sub]->vehicles;
    res.counts.pollsters += best[sub]->pollsters;
    mask ^= sub;
  }
  res.counts.days = best_d;
  while (static_cast<int>(plan.days.size()) < S) plan.days.push_back(DayPlan{});
  res.plan = canonicalize_plan(inst, plan);
  res.cost = plan_cost(inst, *res.plan);
  res.status = budget.exhausted() ? ExactStatus::BudgetExceeded : ExactStatus::Optimal;
  return res;
}

/// Every feasible plan up to relabeling of days, vehicles and pollsters, in
/// canonical form, at most `cap` of them. Active days without routes are
/// included as separate plans.
inline std::vector<Plan> enumerate_feasible(const Instance& inst, std::size_t cap = 100000) {
  if (inst.n > 3) throw Error("plan enumeration needs n <= 3");
  const int n = inst.n;
  const std::uint32_t full = (1u << n) - 1;
  detail::SearchBudget budget(ExactLimits{});

  // all canonical single-day plans per store set
  std::vector<std::vector<DayPlan>> days(static_cast<std::size_t>(full) + 1);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    std::set<std::string> seen;
    for (int k = 1; k <= inst.num_vehicles; ++k)
      for (int e = k; e <= std::min(inst.num_pollsters, inst.capacity * k); ++e) {
        detail::DaySearch search(inst, mask, k, e, budget);
        search.run([&](const DayPlan& d) {
          Plan one;
          one.days = {d};
          Plan c = canonicalize_plan(inst, one);
          if (seen.insert(to_json(c).dump()).second) days[mask].push_back(c.days[0]);
          return false;
        });
      }
  }

  std::vector<Plan> out;
  std::set<std::string> seen;
  std::vector<DayPlan> chosen;
  const int S = inst.num_days;
  std::function<void(std::uint32_t, std::uint32_t)> rec = [&](std::uint32_t left, std::uint32_t min_sub) {
    if (out.size() >= cap) return;
    if (left == 0) {
      const int busy = static_cast<int>(chosen.size());
      for (int empty = 0; busy + empty <= S; ++empty) {
        if (busy + empty == 0) continue;
        Plan p;
        p.days = chosen;
        for (int q = 0; q < empty; ++q) p.days.push_back(DayPlan{true, false, {}, {}});
        while (static_cast<int>(p.days.size()) < S) p.days.push_back(DayPlan{});
        Plan c = canonicalize_plan(inst, p);
        if (seen.insert(to_json(c).dump()).second && out.size() < cap) out.push_back(std::move(c));
      }
      return;
    }
    if (static_cast<int>(chosen.size()) >= S) return;
    const std::uint32_t low = left & (~left + 1);
    for (std::uint32_t sub = left; sub; sub = (sub - 1) & left) {
      if (!(sub & low)) continue;
      (void)min_sub;
      for (const DayPlan& d : days[sub]) {
        chosen.push_back(d);
        rec(left ^ sub, 0);
        chosen.pop_back();
      }
    }
  };
  rec(full, 0);
  return out;
}

inline Json to_json(const ExactResult& r) {
  Json j;
  j["status"] = status_tag(r.status);
  if (r.plan) {
    j["cost"] = r.cost;
    j["days"] = r.counts.days;
    j["vehicles"] = r.counts.vehicles;
    j["pollsters"] = r.counts.pollsters;
    j["plan"] = to_json(*r.plan);
  }
  j["nodes"] = r.nodes;
  return j;
}

}  // namespace ivprp
