#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ivprp/instance.hpp"

namespace ivprp {

enum class LegKind { Ride, Walk };

/// One piece of a pollster's day: riding a vehicle along a subpath of its
/// route, or walking an alternating service/walking path i -> i+n -> j -> j+n.
struct Leg {
  LegKind kind = LegKind::Ride;
  int vehicle = -1;  // rides only
  std::vector<int> nodes;

  static Leg ride(int vehicle, std::vector<int> nodes) { return {LegKind::Ride, vehicle, std::move(nodes)}; }
  static Leg walk(std::vector<int> nodes) { return {LegKind::Walk, -1, std::move(nodes)}; }
  bool operator==(const Leg&) const = default;
};

struct VehicleRoute {
  int vehicle = 0;
  int shift = 0;  // 0 = morning, 1 = afternoon; only split days use shift 1
  std::vector<int> nodes;
  bool operator==(const VehicleRoute&) const = default;
};

struct ServiceRoute {
  int pollster = 0;
  int shift = 0;
  std::vector<Leg> legs;
  std::optional<int> break_store;  // arrival node of the store where the break is taken
  bool operator==(const ServiceRoute&) const = default;
};

/// A day's routes. Split days are two half-shifts linked by a depot pause:
/// the afternoon starts at (B_max - P)/2 + P and each shift must end by its
/// half-shift horizon.
struct DayPlan {
  bool active = false;
  bool split = false;
  std::vector<VehicleRoute> vehicles;
  std::vector<ServiceRoute> pollsters;
  bool operator==(const DayPlan&) const = default;
};

/// Node times B_i (arrival at i in C-, departure from i in C+) and the last
/// depot return of every day.
struct Schedule {
  std::vector<std::optional<Minutes>> node_time;
  std::vector<std::optional<Minutes>> day_return;
  bool operator==(const Schedule&) const = default;
};

struct Plan {
  std::vector<DayPlan> days;
  std::optional<Schedule> schedule;  // informational; never trusted by the checker
};

enum class Family { Coverage, WalkStructure, PickupDeliverySync, Capacity, Flow, Time, Break, Resource, DayLength };

inline const char* family_tag(Family f) {
  switch (f) {
    case Family::Coverage: return "coverage";
    case Family::WalkStructure: return "walk-structure";
    case Family::PickupDeliverySync: return "pickup-delivery-sync";
    case Family::Capacity: return "capacity";
    case Family::Flow: return "flow";
    case Family::Time: return "time";
    case Family::Break: return "break";
    case Family::Resource: return "resource";
    case Family::DayLength: return "day-length";
  }
  return "?";
}

struct Violation {
  Family family;
  std::string detail;
};

struct FeasibilityReport {
  bool ok = true;
  std::vector<Violation> violations;
  Schedule schedule;

  bool has(Family f) const {
    return std::any_of(violations.begin(), violations.end(), [f](const Violation& v) { return v.family == f; });
  }
};

struct CheckOptions {
  bool breaks = true;  // false: reduced single-shift semantics without pauses
};

struct ResourceUsage {
  int days = 0;
  int vehicles = 0;   // summed over days
  int pollsters = 0;  // summed over days
};

/// Afternoon offset and half-shift horizon used by split days.
inline Minutes half_shift_horizon(const Instance& inst) { return (inst.b_max - inst.pause).halved(); }

namespace detail {

inline std::string arc_str(int a, int b) { return "(" + std::to_string(a) + "," + std::to_string(b) + ")"; }

/// Concatenated node sequence of a service route (junction nodes once).
inline std::vector<int> route_nodes(const ServiceRoute& r) {
  std::vector<int> seq;
  for (const Leg& leg : r.legs)
    for (std::size_t i = 0; i < leg.nodes.size(); ++i)
      if (seq.empty() || i > 0 || seq.back() != leg.nodes[i]) seq.push_back(leg.nodes[i]);
  return seq;
}

struct TimeEdge {
  int from;  // -1: constant release
  int to;
  Minutes weight;
};

struct UpperBound {
  int node;
  Minutes offset;  // B_node + offset <= limit
  Minutes limit;
  Family family;
  std::string what;
};

/// Least solution of B_to >= B_from + w over nonnegative times; nullopt on a
/// positive cycle.
inline std::optional<std::vector<Minutes>> longest_paths(int num_nodes, const std::vector<TimeEdge>& edges,
                                                         const std::vector<bool>& used) {
  std::vector<Minutes> b(static_cast<std::size_t>(num_nodes));
  for (const TimeEdge& e : edges)
    if (e.from < 0) b[static_cast<std::size_t>(e.to)] = std::max(b[static_cast<std::size_t>(e.to)], e.weight);
  const int rounds = static_cast<int>(std::count(used.begin(), used.end(), true)) + 1;
  for (int round = 0; round <= rounds; ++round) {
    bool changed = false;
    for (const TimeEdge& e : edges) {
      if (e.from < 0) continue;
      Minutes cand = b[static_cast<std::size_t>(e.from)] + e.weight;
      if (cand > b[static_cast<std::size_t>(e.to)]) {
        b[static_cast<std::size_t>(e.to)] = cand;
        changed = true;
      }
    }
    if (!changed) return b;
  }
  return std::nullopt;
}

struct Block {
  int day;
  int shift;
  std::vector<const VehicleRoute*> vehicles;
  std::vector<const ServiceRoute*> pollsters;
  bool sound = true;  // structurally valid enough for timing
};

class Checker {
 public:
  Checker(const Instance& inst, const Plan& plan, CheckOptions opts)
      : inst_(inst), plan_(plan), opts_(opts), n_(inst.n), sink_(2 * inst.n + 1) {}

  FeasibilityReport run() {
    rep_.schedule.node_time.assign(static_cast<std::size_t>(inst_.num_nodes()), std::nullopt);
    rep_.schedule.day_return.assign(plan_.days.size(), std::nullopt);
    if (static_cast<int>(plan_.days.size()) > inst_.num_days)
      add(Family::Resource, "plan spans " + std::to_string(plan_.days.size()) + " days, at most " +
                                std::to_string(inst_.num_days) + " available");
    served_.assign(static_cast<std::size_t>(n_ + 1), 0);
    for (std::size_t d = 0; d < plan_.days.size(); ++d) check_day(static_cast<int>(d));
    for (int i = 1; i <= n_; ++i) {
      const int c = served_[static_cast<std::size_t>(i)];
      if (c != 1)
        add(Family::Coverage, "store " + std::to_string(i) + " served " + std::to_string(c) + " times");
    }
    for (Block& b : blocks_) {
      check_sync_and_capacity(b);
      if (b.sound) check_times(b);
    }
    rep_.ok = rep_.violations.empty();
    return std::move(rep_);
  }

  bool timing_failed() const { return timing_failed_; }

 private:
  void add(Family f, std::string detail) { rep_.violations.push_back({f, std::move(detail)}); }

  std::string where(int day, int shift) const {
    std::string s = "day " + std::to_string(day);
    if (plan_.days[static_cast<std::size_t>(day)].split) s += shift == 0 ? " morning" : " afternoon";
    return s;
  }

  void check_day(int d) {
    const DayPlan& day = plan_.days[static_cast<std::size_t>(d)];
    if (!day.active && (!day.vehicles.empty() || !day.pollsters.empty()))
      add(Family::Resource, "day " + std::to_string(d) + " has routes but is not active");
    const int shifts = day.split ? 2 : 1;
    std::vector<Block> blocks;
    for (int s = 0; s < shifts; ++s) blocks.push_back(Block{d, s, {}, {}, true});

    std::set<std::pair<int, int>> seen_vehicles, seen_pollsters;
    for (const VehicleRoute& r : day.vehicles) {
      if (r.vehicle < 0 || r.vehicle >= inst_.num_vehicles) {
        add(Family::Resource, "vehicle " + std::to_string(r.vehicle) + " out of range on day " + std::to_string(d));
        continue;
      }
      if (r.shift < 0 || r.shift >= shifts) {
        add(Family::Flow, "vehicle " + std::to_string(r.vehicle) + " uses shift " + std::to_string(r.shift) +
                              " on day " + std::to_string(d));
        continue;
      }
      Block& b = blocks[static_cast<std::size_t>(r.shift)];
      if (!seen_vehicles.insert({r.vehicle, r.shift}).second) {
        add(Family::Flow, "vehicle " + std::to_string(r.vehicle) + " leaves the depot twice on " + where(d, r.shift));
        b.sound = false;
      }
      if (!vehicle_route_ok(r, d)) b.sound = false;
      b.vehicles.push_back(&r);
    }
    for (const ServiceRoute& r : day.pollsters) {
      if (r.pollster < 0 || r.pollster >= inst_.num_pollsters) {
        add(Family::Resource, "pollster " + std::to_string(r.pollster) + " out of range on day " + std::to_string(d));
        continue;
      }
      if (r.shift < 0 || r.shift >= shifts) {
        add(Family::Flow, "pollster " + std::to_string(r.pollster) + " uses shift " + std::to_string(r.shift) +
                              " on day " + std::to_string(d));
        continue;
      }
      Block& b = blocks[static_cast<std::size_t>(r.shift)];
      if (!seen_pollsters.insert({r.pollster, r.shift}).second) {
        add(Family::Flow, "pollster " + std::to_string(r.pollster) + " leaves the depot twice on " +
                              where(d, r.shift));
        b.sound = false;
      }
      if (!service_route_ok(r, b)) b.sound = false;
      b.pollsters.push_back(&r);
    }
    for (Block& b : blocks) blocks_.push_back(std::move(b));
  }

  bool vehicle_route_ok(const VehicleRoute& r, int d) {
    const std::string who = "vehicle " + std::to_string(r.vehicle) + " on " + where(d, r.shift);
    if (r.nodes.size() < 3 || r.nodes.front() != 0 || r.nodes.back() != sink_) {
      add(Family::Flow, who + ": route must run from depot 0 to depot copy " + std::to_string(sink_) +
                            " through at least one store");
      return false;
    }
    bool ok = true;
    std::set<int> seen;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      const int v = r.nodes[i];
      if (v < 0 || v > sink_) {
        add(Family::Flow, who + ": node " + std::to_string(v) + " out of range");
        return false;
      }
      if (!seen.insert(v).second) {
        add(Family::Flow, who + ": node " + std::to_string(v) + " repeated");
        ok = false;
      }
      if (i + 1 < r.nodes.size() && !is_vehicular_arc(n_, v, r.nodes[i + 1])) {
        add(Family::Flow, who + ": " + arc_str(v, r.nodes[i + 1]) + " is not a vehicular arc");
        ok = false;
      }
    }
    return ok;
  }

  const VehicleRoute* find_vehicle(const Block& b, int vehicle) const {
    for (const VehicleRoute* v : b.vehicles)
      if (v->vehicle == vehicle) return v;
    return nullptr;
  }

  bool service_route_ok(const ServiceRoute& r, const Block& b) {
    const std::string who = "pollster " + std::to_string(r.pollster) + " on " + where(b.day, b.shift);
    bool ok = true;
    if (r.legs.empty()) {
      add(Family::WalkStructure, who + ": empty service route");
      return false;
    }
    std::set<int> own_stores;
    for (std::size_t li = 0; li < r.legs.size(); ++li) {
      const Leg& leg = r.legs[li];
      if (leg.nodes.size() < 2) {
        add(Family::WalkStructure, who + ": leg " + std::to_string(li) + " has fewer than two nodes");
        ok = false;
        continue;
      }
      for (int v : leg.nodes)
        if (v < 0 || v > sink_) {
          add(Family::WalkStructure, who + ": node " + std::to_string(v) + " out of range");
          return false;
        }
      if (li > 0) {
        const Leg& prev = r.legs[li - 1];
        if (prev.kind == leg.kind) {
          add(Family::WalkStructure, who + ": consecutive " + std::string(leg.kind == LegKind::Ride ? "ride" : "walk") +
                                         " legs " + std::to_string(li - 1) + " and " + std::to_string(li));
          ok = false;
        }
        if (!prev.nodes.empty() && prev.nodes.back() != leg.nodes.front()) {
          add(Family::PickupDeliverySync, who + ": leg " + std::to_string(li) + " starts at " +
                                              std::to_string(leg.nodes.front()) + " but previous leg ends at " +
                                              std::to_string(prev.nodes.back()));
          ok = false;
        }
      }
      if (leg.kind == LegKind::Ride) {
        const VehicleRoute* vr = find_vehicle(b, leg.vehicle);
        if (vr == nullptr) {
          add(Family::PickupDeliverySync, who + ": rides vehicle " + std::to_string(leg.vehicle) +
                                              " which has no route in that shift");
          ok = false;
          continue;
        }
        auto it = std::find(vr->nodes.begin(), vr->nodes.end(), leg.nodes.front());
        const auto start = static_cast<std::size_t>(it - vr->nodes.begin());
        bool sub = it != vr->nodes.end() && start + leg.nodes.size() <= vr->nodes.size() &&
                   std::equal(leg.nodes.begin(), leg.nodes.end(), it);
        if (!sub) {
          add(Family::PickupDeliverySync, who + ": ride leg " + std::to_string(li) +
                                              " is not a contiguous part of vehicle " + std::to_string(leg.vehicle) +
                                              "'s route");
          ok = false;
        }
      } else {
        if (leg.nodes.size() % 2 != 0 || !inst_.is_arrival(leg.nodes.front()) ||
            !inst_.is_departure(leg.nodes.back())) {
          add(Family::WalkStructure, who + ": walking path must start at a store and end at a store copy");
          ok = false;
          continue;
        }
        for (std::size_t k = 0; k + 1 < leg.nodes.size(); ++k) {
          const int a = leg.nodes[k], c = leg.nodes[k + 1];
          const bool good = k % 2 == 0 ? is_service_arc(n_, a, c) : is_walking_arc(n_, a, c);
          if (!good) {
            add(Family::WalkStructure, who + ": " + arc_str(a, c) + " breaks the service/walking alternation");
            ok = false;
          }
        }
        for (std::size_t k = 0; k < leg.nodes.size(); k += 2) {
          const int i = leg.nodes[k];
          if (inst_.is_arrival(i)) {
            ++served_[static_cast<std::size_t>(i)];
            own_stores.insert(i);
          }
        }
      }
    }
    if (r.legs.front().kind != LegKind::Ride || r.legs.front().nodes.empty() || r.legs.front().nodes.front() != 0) {
      add(Family::PickupDeliverySync, who + ": must leave the depot on a vehicle");
      ok = false;
    }
    if (r.legs.back().kind != LegKind::Ride || r.legs.back().nodes.empty() || r.legs.back().nodes.back() != sink_) {
      add(Family::PickupDeliverySync, who + ": must return to the depot on a vehicle");
      ok = false;
    }
    const auto seq = route_nodes(r);
    std::set<int> distinct(seq.begin(), seq.end());
    if (distinct.size() != seq.size()) {
      add(Family::WalkStructure, who + ": service route is not a simple path");
      ok = false;
    }
    const bool split = plan_.days[static_cast<std::size_t>(b.day)].split;
    if (opts_.breaks && !split) {
      if (!r.break_store) {
        add(Family::Break, who + ": takes no break");
      } else if (!own_stores.count(*r.break_store)) {
        add(Family::Break, who + ": break at store " + std::to_string(*r.break_store) +
                               " which this pollster does not serve");
      }
    }
    if (split && r.break_store)
      add(Family::Break, who + ": split days take the pause at the depot, not at store " +
                             std::to_string(*r.break_store));
    return ok;
  }

  void check_sync_and_capacity(Block& b) {
    const std::string at = where(b.day, b.shift);
    for (const VehicleRoute* vr : b.vehicles) {
      if (vr->nodes.size() < 3) continue;
      std::map<int, int> drops, picks;
      std::map<std::pair<int, int>, int> load;
      for (const ServiceRoute* sr : b.pollsters) {
        for (std::size_t li = 0; li < sr->legs.size(); ++li) {
          const Leg& leg = sr->legs[li];
          if (leg.kind != LegKind::Ride || leg.vehicle != vr->vehicle || leg.nodes.empty()) continue;
          if (li + 1 < sr->legs.size()) ++drops[leg.nodes.back()];
          if (li > 0) ++picks[leg.nodes.front()];
          for (std::size_t k = 0; k + 1 < leg.nodes.size(); ++k) ++load[{leg.nodes[k], leg.nodes[k + 1]}];
        }
      }
      for (std::size_t k = 1; k + 1 < vr->nodes.size(); ++k) {
        const int v = vr->nodes[k];
        const int expect = inst_.is_arrival(v) ? drops[v] : picks[v];
        if (expect != 1) {
          add(Family::PickupDeliverySync,
              "vehicle " + std::to_string(vr->vehicle) + " on " + at + " stops at node " + std::to_string(v) + " and " +
                  (inst_.is_arrival(v) ? "drops " : "picks up ") + std::to_string(expect) +
                  " pollsters instead of exactly one");
          b.sound = false;
        }
      }
      for (const auto& [arc, riders] : load) {
        if (riders > inst_.capacity)
          add(Family::Capacity, "vehicle " + std::to_string(vr->vehicle) + " on " + at + " carries " +
                                    std::to_string(riders) + " pollsters on arc " + arc_str(arc.first, arc.second) +
                                    ", capacity " + std::to_string(inst_.capacity));
      }
    }
  }

  struct TimeModel {
    std::vector<TimeEdge> edges;
    std::vector<UpperBound> uppers;
    std::vector<bool> used;
    std::vector<std::pair<int, int>> returns;  // (last node, vehicle)
  };

  TimeModel time_model(const Block& b, bool releases, Minutes start, Minutes end) const {
    TimeModel m;
    m.used.assign(static_cast<std::size_t>(inst_.num_nodes()), false);
    for (const VehicleRoute* vr : b.vehicles) {
      const auto& nd = vr->nodes;
      m.edges.push_back({-1, nd[1], start + inst_.drive_time(0, nd[1])});
      for (std::size_t k = 1; k + 1 < nd.size(); ++k) {
        m.used[static_cast<std::size_t>(nd[k])] = true;
        if (k + 2 < nd.size()) m.edges.push_back({nd[k], nd[k + 1], inst_.drive_time(nd[k], nd[k + 1])});
      }
      const int last = nd[nd.size() - 2];
      m.uppers.push_back({last, inst_.drive_time(last, sink_), end, Family::DayLength,
                          "vehicle " + std::to_string(vr->vehicle) + " returns to the depot"});
      m.returns.push_back({last, vr->vehicle});
    }
    const bool store_breaks = opts_.breaks && !plan_.days[static_cast<std::size_t>(b.day)].split;
    for (const ServiceRoute* sr : b.pollsters) {
      for (const Leg& leg : sr->legs) {
        if (leg.kind != LegKind::Walk) continue;
        for (std::size_t k = 0; k + 1 < leg.nodes.size(); ++k) {
          const int a = leg.nodes[k], c = leg.nodes[k + 1];
          m.used[static_cast<std::size_t>(a)] = m.used[static_cast<std::size_t>(c)] = true;
          if (k % 2 == 0) {
            Minutes w = inst_.service_time(a);
            const bool brk = store_breaks && sr->break_store == a;
            if (brk) {
              w += inst_.pause;
              if (releases) m.edges.push_back({-1, a, inst_.t0 - inst_.service_time(a)});
              m.uppers.push_back({a, inst_.service_time(a), inst_.t1, Family::Break,
                                  "break of pollster " + std::to_string(sr->pollster) + " at store " +
                                      std::to_string(a)});
            }
            m.edges.push_back({a, c, w});
          } else {
            m.edges.push_back({a, c, inst_.walk_time(a, c)});
          }
        }
      }
    }
    return m;
  }

  void check_times(const Block& b) {
    const std::string at = where(b.day, b.shift);
    const bool split = plan_.days[static_cast<std::size_t>(b.day)].split;
    const Minutes half = half_shift_horizon(inst_);
    const Minutes start = split && b.shift == 1 ? half + inst_.pause : Minutes{};
    const Minutes end = split && b.shift == 0 ? half : inst_.b_max;
    if (b.vehicles.empty() && b.pollsters.empty()) return;

    const TimeModel early = time_model(b, false, start, end);
    auto t_early = longest_paths(inst_.num_nodes(), early.edges, early.used);
    if (!t_early) {
      add(Family::Time, at + ": cyclic timing dependencies between legs");
      timing_failed_ = true;
      return;
    }
    std::size_t before = rep_.violations.size();
    for (const UpperBound& u : early.uppers) {
      const Minutes at_time = (*t_early)[static_cast<std::size_t>(u.node)] + u.offset;
      if (at_time > u.limit)
        add(u.family, at + ": " + u.what + (u.family == Family::Break ? " starts at " : " at minute ") +
                          at_time.str() + ", after " + u.limit.str());
    }
    const TimeModel late = time_model(b, true, start, end);
    auto t_late = longest_paths(inst_.num_nodes(), late.edges, late.used);
    if (!t_late) {
      add(Family::Time, at + ": cyclic timing dependencies between legs");
      timing_failed_ = true;
      return;
    }
    if (rep_.violations.size() == before) {
      for (const UpperBound& u : late.uppers) {
        const Minutes at_time = (*t_late)[static_cast<std::size_t>(u.node)] + u.offset;
        if (at_time > u.limit) {
          add(Family::Break, at + ": no break can start inside [" + inst_.t0.str() + "," + inst_.t1.str() +
                                 "]; delaying to the window pushes " + u.what + " to " + at_time.str() +
                                 ", after " + u.limit.str());
          break;
        }
      }
    }
    const auto& times = *t_late;
    for (std::size_t v = 0; v < late.used.size(); ++v)
      if (late.used[v]) rep_.schedule.node_time[v] = times[v];
    std::map<int, Minutes> vehicle_return;
    auto& day_ret = rep_.schedule.day_return[static_cast<std::size_t>(b.day)];
    for (const auto& [last, vehicle] : late.returns) {
      const Minutes r = times[static_cast<std::size_t>(last)] + inst_.drive_time(last, sink_);
      vehicle_return[vehicle] = r;
      if (!day_ret || r > *day_ret) day_ret = r;
    }
    if (split && opts_.breaks) check_depot_breaks(b, vehicle_return, half);
  }

  // Pollsters on split days pause at the depot somewhere between their morning
  // return and the start of the afternoon shift.
  void check_depot_breaks(const Block& b, const std::map<int, Minutes>& vehicle_return, Minutes half) {
    const DayPlan& day = plan_.days[static_cast<std::size_t>(b.day)];
    for (const ServiceRoute* sr : b.pollsters) {
      Minutes free_at;
      if (b.shift == 0) {
        auto it = vehicle_return.find(sr->legs.back().vehicle);
        if (it != vehicle_return.end()) free_at = it->second;
      } else {
        bool morning = std::any_of(day.pollsters.begin(), day.pollsters.end(), [&](const ServiceRoute& o) {
          return o.pollster == sr->pollster && o.shift == 0;
        });
        if (morning) continue;  // checked with the morning block
      }
      const Minutes lo = std::max(inst_.t0, free_at);
      const Minutes hi = std::min(inst_.t1, half);
      if (lo > hi)
        add(Family::Break, "pollster " + std::to_string(sr->pollster) + " on day " + std::to_string(b.day) +
                               ": depot pause cannot start inside [" + inst_.t0.str() + "," + inst_.t1.str() +
                               "] before the afternoon shift");
    }
  }

  const Instance& inst_;
  const Plan& plan_;
  CheckOptions opts_;
  int n_;
  int sink_;
  FeasibilityReport rep_;
  std::vector<int> served_;
  std::vector<Block> blocks_;
  bool timing_failed_ = false;
};

}  // namespace detail

/// Verifies every constraint family of the routing model against a plan,
/// collecting all violations. Times are recomputed; plan.schedule is ignored.
inline FeasibilityReport check_plan(const Instance& inst, const Plan& plan, CheckOptions opts = {}) {
  return detail::Checker(inst, plan, opts).run();
}

/// Tightest schedule of a structurally valid plan: earliest times, with a
/// pollster waiting before service only as long as needed to start its break
/// at T0.
inline Schedule simulate_times(const Instance& inst, const Plan& plan, CheckOptions opts = {}) {
  detail::Checker checker(inst, plan, opts);
  FeasibilityReport rep = checker.run();
  for (const Violation& v : rep.violations) {
    if (v.family == Family::Flow || v.family == Family::WalkStructure || v.family == Family::PickupDeliverySync ||
        v.family == Family::Time)
      throw Error("cannot schedule malformed plan: " + v.detail);
  }
  return rep.schedule;
}

inline ResourceUsage plan_usage(const Plan& plan) {
  ResourceUsage u;
  for (const DayPlan& d : plan.days) {
    if (!d.active) continue;
    ++u.days;
    std::set<int> vehicles, pollsters;
    for (const auto& r : d.vehicles) vehicles.insert(r.vehicle);
    for (const auto& r : d.pollsters) pollsters.insert(r.pollster);
    u.vehicles += static_cast<int>(vehicles.size());
    u.pollsters += static_cast<int>(pollsters.size());
  }
  return u;
}

/// Daily fixed cost per active day plus hiring cost per vehicle and pollster
/// on duty each day.
inline double plan_cost(const Instance& inst, const Plan& plan) {
  const ResourceUsage u = plan_usage(plan);
  return inst.costs.day * u.days + inst.costs.vehicle * u.vehicles + inst.costs.pollster * u.pollsters;
}

namespace detail {

inline void flatten_legs(const ServiceRoute& r, std::vector<int>& out) {
  for (const Leg& l : r.legs) {
    out.push_back(l.kind == LegKind::Ride ? 1 : 2);
    out.push_back(l.vehicle);
    out.insert(out.end(), l.nodes.begin(), l.nodes.end());
    out.push_back(-1);
  }
  out.push_back(r.break_store.value_or(-1));
  out.push_back(-2);
}

inline std::vector<int> flatten_day(const DayPlan& d) {
  std::vector<int> out{d.active, d.split};
  for (const auto& r : d.vehicles) {
    out.insert(out.end(), {r.shift, r.vehicle});
    out.insert(out.end(), r.nodes.begin(), r.nodes.end());
    out.push_back(-1);
  }
  out.push_back(-3);
  for (const auto& r : d.pollsters) {
    out.insert(out.end(), {r.shift, r.pollster});
    flatten_legs(r, out);
  }
  return out;
}

/// New labels ordered by signature; equal signatures keep their old order.
template <class Sig>
std::map<int, int> relabel(std::map<int, Sig> sig) {
  std::vector<std::pair<Sig, int>> order;
  for (auto& [label, s] : sig) order.push_back({std::move(s), label});
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::map<int, int> out;
  for (const auto& [s, label] : order) out.emplace(label, static_cast<int>(out.size()));
  return out;
}

}  // namespace detail

/// Canonical form up to relabeling: days ordered busiest first, vehicles and
/// pollsters of a day numbered by their routes across both shifts.
inline Plan canonicalize_plan(const Instance& inst, const Plan& plan) {
  (void)inst;
  std::vector<DayPlan> days;
  for (DayPlan day : plan.days) {
    std::map<int, std::vector<std::vector<int>>> vsig;
    for (const auto& r : day.vehicles) {
      auto& s = vsig[r.vehicle];
      s.resize(2);
      if (r.shift >= 0 && r.shift < 2) s[static_cast<std::size_t>(r.shift)] = r.nodes;
    }
    const auto vmap = detail::relabel(std::move(vsig));
    for (auto& r : day.vehicles) r.vehicle = vmap.at(r.vehicle);
    for (auto& r : day.pollsters)
      for (auto& leg : r.legs)
        if (leg.kind == LegKind::Ride && vmap.count(leg.vehicle)) leg.vehicle = vmap.at(leg.vehicle);
    std::map<int, std::vector<std::vector<int>>> psig;
    for (const auto& r : day.pollsters) {
      auto& s = psig[r.pollster];
      s.resize(2);
      if (r.shift >= 0 && r.shift < 2) detail::flatten_legs(r, s[static_cast<std::size_t>(r.shift)]);
    }
    const auto pmap = detail::relabel(std::move(psig));
    for (auto& r : day.pollsters) r.pollster = pmap.at(r.pollster);
    std::stable_sort(day.vehicles.begin(), day.vehicles.end(), [](const VehicleRoute& a, const VehicleRoute& b) {
      return std::tie(a.shift, a.vehicle) < std::tie(b.shift, b.vehicle);
    });
    std::stable_sort(day.pollsters.begin(), day.pollsters.end(), [](const ServiceRoute& a, const ServiceRoute& b) {
      return std::tie(a.shift, a.pollster) < std::tie(b.shift, b.pollster);
    });
    days.push_back(std::move(day));
  }
  struct Key {
    int kind;  // 0 busy, 1 active but empty, 2 inactive
    int pollsters;
    int vehicles;
    std::vector<int> content;
  };
  std::vector<Key> keys;
  for (const DayPlan& day : days) {
    std::set<int> v, p;
    for (const auto& r : day.vehicles) v.insert(r.vehicle);
    for (const auto& r : day.pollsters) p.insert(r.pollster);
    const int kind = !day.active ? 2 : (v.empty() && p.empty() ? 1 : 0);
    keys.push_back({kind, -static_cast<int>(p.size()), -static_cast<int>(v.size()), detail::flatten_day(day)});
  }
  std::vector<std::size_t> order(days.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&keys](std::size_t a, std::size_t b) {
    const Key &ka = keys[a], &kb = keys[b];
    return std::tie(ka.kind, ka.pollsters, ka.vehicles, ka.content) < std::tie(kb.kind, kb.pollsters, kb.vehicles, kb.content);
  });
  Plan out;
  for (std::size_t d : order) out.days.push_back(std::move(days[d]));
  return out;
}

// -- JSON ----------------------------------------------------------------------

inline Json to_json(const Plan& plan) {
  Json days = Json::array();
  for (std::size_t d = 0; d < plan.days.size(); ++d) {
    const DayPlan& day = plan.days[d];
    Json jd;
    jd["day"] = d;
    jd["active"] = day.active;
    jd["split"] = day.split;
    Json vs = Json::array();
    for (const auto& r : day.vehicles) vs.push_back({{"vehicle", r.vehicle}, {"shift", r.shift}, {"nodes", r.nodes}});
    jd["vehicles"] = vs;
    Json ps = Json::array();
    for (const auto& r : day.pollsters) {
      Json legs = Json::array();
      for (const Leg& leg : r.legs) {
        if (leg.kind == LegKind::Ride)
          legs.push_back({{"ride", {{"vehicle", leg.vehicle}, {"nodes", leg.nodes}}}});
        else
          legs.push_back({{"walk", {{"nodes", leg.nodes}}}});
      }
      Json jp{{"pollster", r.pollster}, {"shift", r.shift}, {"legs", legs}};
      jp["break"] = r.break_store ? Json(*r.break_store) : Json(nullptr);
      ps.push_back(jp);
    }
    jd["pollsters"] = ps;
    days.push_back(jd);
  }
  Json j{{"days", days}};
  if (plan.schedule) {
    Json times = Json::object();
    for (std::size_t v = 0; v < plan.schedule->node_time.size(); ++v)
      if (plan.schedule->node_time[v]) times[std::to_string(v)] = plan.schedule->node_time[v]->value();
    Json ret = Json::array();
    for (const auto& r : plan.schedule->day_return) ret.push_back(r ? Json(r->value()) : Json(nullptr));
    j["schedule"] = {{"node_time", times}, {"day_return", ret}};
  }
  return j;
}

inline Plan plan_from_json(const Json& j) {
  try {
    Plan plan;
    for (const Json& jd : j.at("days")) {
      DayPlan day;
      day.active = jd.value("active", false);
      day.split = jd.value("split", false);
      for (const Json& jv : jd.value("vehicles", Json::array()))
        day.vehicles.push_back({jv.at("vehicle").get<int>(), jv.value("shift", 0), jv.at("nodes").get<std::vector<int>>()});
      for (const Json& jp : jd.value("pollsters", Json::array())) {
        ServiceRoute r;
        r.pollster = jp.at("pollster").get<int>();
        r.shift = jp.value("shift", 0);
        if (jp.contains("break") && !jp["break"].is_null()) r.break_store = jp["break"].get<int>();
        for (const Json& jl : jp.at("legs")) {
          if (jl.contains("ride"))
            r.legs.push_back(Leg::ride(jl["ride"].at("vehicle").get<int>(), jl["ride"].at("nodes").get<std::vector<int>>()));
          else if (jl.contains("walk"))
            r.legs.push_back(Leg::walk(jl["walk"].at("nodes").get<std::vector<int>>()));
          else
            throw Error("leg must be {\"ride\": ...} or {\"walk\": ...}");
        }
        day.pollsters.push_back(std::move(r));
      }
      plan.days.push_back(std::move(day));
    }
    return plan;
  } catch (const Json::exception& e) {
    throw Error(std::string("malformed plan JSON: ") + e.what());
  }
}

inline Json report_to_json(const FeasibilityReport& rep) {
  Json v = Json::array();
  for (const auto& x : rep.violations) v.push_back({{"family", family_tag(x.family)}, {"detail", x.detail}});
  Json ret = Json::array();
  for (const auto& r : rep.schedule.day_return) ret.push_back(r ? Json(r->value()) : Json(nullptr));
  return {{"ok", rep.ok}, {"violations", v}, {"day_return", ret}};
}

/// GeoJSON FeatureCollection with one LineString per vehicle route and per
/// walking path. Geometry is null when the instance carries no coordinates.
inline Json to_geojson(const Instance& inst, const Plan& plan) {
  std::array<double, 2> depot{0, 0};
  if (inst.coords && !inst.coords->empty()) {
    for (const auto& p : *inst.coords) {
      depot[0] += p[0];
      depot[1] += p[1];
    }
    depot[0] /= static_cast<double>(inst.coords->size());
    depot[1] /= static_cast<double>(inst.coords->size());
  }
  auto line = [&](const std::vector<int>& nodes) -> Json {
    if (!inst.coords) return nullptr;
    Json coords = Json::array();
    std::optional<std::array<double, 2>> last;
    for (int v : nodes) {
      std::array<double, 2> p = (v == 0 || v == inst.depot_copy())
                                    ? depot
                                    : (*inst.coords)[static_cast<std::size_t>(inst.store_of(v) - 1)];
      if (last && *last == p) continue;
      coords.push_back({p[0], p[1]});
      last = p;
    }
    return {{"type", "LineString"}, {"coordinates", coords}};
  };
  Json features = Json::array();
  for (std::size_t d = 0; d < plan.days.size(); ++d) {
    for (const auto& r : plan.days[d].vehicles)
      features.push_back({{"type", "Feature"},
                          {"geometry", line(r.nodes)},
                          {"properties", {{"day", d}, {"kind", "drive"}, {"agent", r.vehicle}, {"shift", r.shift}}}});
    for (const auto& r : plan.days[d].pollsters)
      for (const Leg& leg : r.legs)
        if (leg.kind == LegKind::Walk)
          features.push_back({{"type", "Feature"},
                              {"geometry", line(leg.nodes)},
                              {"properties", {{"day", d}, {"kind", "walk"}, {"agent", r.pollster}, {"shift", r.shift}}}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

}  // namespace ivprp
