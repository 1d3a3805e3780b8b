#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ivprp/instance.hpp"
#include "ivprp/linear.hpp"

namespace ivprp {

struct ResourceTriple {
  int days = 0;
  int vehicles = 0;
  int pollsters = 0;
  bool operator==(const ResourceTriple&) const = default;
};

struct UpperBound {
  ResourceTriple counts;
  double objective = 0;
};

struct LowerBound {
  ResourceTriple counts;
  double cost = 0;
};

/// Either the lower-bound triple or a certificate naming the failed stage.
struct LowerBoundResult {
  std::optional<LowerBound> bound;
  std::string certificate;
  bool feasible() const { return bound.has_value(); }
};

struct ResourceBounds {
  std::optional<UpperBound> upper;
  LowerBoundResult lower;
};

/// Λ_{E,s}: cumulative pollster counts achievable over s days.
inline bool in_cumulative_set(int pollsters_total, int days, int pollsters_per_day) {
  return days <= pollsters_total && pollsters_total <= days * pollsters_per_day;
}

namespace detail {

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return a <= 0 ? 0 : (a + b - 1) / b; }

/// Sum over all nodes of (largest outgoing + largest incoming vehicular time).
inline Minutes vehicular_spread(const Instance& inst) {
  const Multigraph g = build_multigraph(inst);
  std::vector<Minutes> out(static_cast<std::size_t>(g.num_nodes())), in(out.size());
  for (const Arc& a : g.vehicular) {
    out[static_cast<std::size_t>(a.from)] = std::max(out[static_cast<std::size_t>(a.from)], a.time);
    in[static_cast<std::size_t>(a.to)] = std::max(in[static_cast<std::size_t>(a.to)], a.time);
  }
  Minutes total;
  for (std::size_t v = 0; v < out.size(); ++v) total += out[v] + in[v];
  return total;
}

}  // namespace detail

/// Whether (days, vehicles, pollsters) passes the averaged workload test of
/// the upper-bound program. Evaluated exactly in centi-minutes.
inline bool upper_bound_admits(const Instance& inst, int days, int vehicles, int pollsters, Minutes spread) {
  if (vehicles > pollsters || pollsters > inst.capacity * vehicles) return false;
  const std::int64_t s = days, k = vehicles, e = pollsters;
  const std::int64_t lhs = (inst.pause.centi() * e * s + inst.total_service().centi()) * k + e * spread.centi();
  return lhs <= inst.b_max.centi() * s * e * k;
}

/// Exhaustive search for the cheapest admissible triple; ties go to the
/// lexicographically smallest (days, vehicles, pollsters).
inline std::optional<UpperBound> upper_bound_resources(const Instance& inst) {
  const Minutes spread = detail::vehicular_spread(inst);
  std::optional<UpperBound> best;
  for (int s = 1; s <= inst.num_days; ++s)
    for (int k = 1; k <= inst.num_vehicles; ++k)
      for (int e = 1; e <= inst.num_pollsters; ++e) {
        if (!upper_bound_admits(inst, s, k, e, spread)) continue;
        const double obj = inst.costs.day * s + inst.costs.vehicle * k * s + inst.costs.pollster * e * s;
        if (!best || obj < best->objective) best = UpperBound{{s, k, e}, obj};
      }
  return best;
}

inline LowerBoundResult lower_bound_resources(const Instance& inst) {
  LowerBoundResult r;
  const std::int64_t shift = (inst.b_max - inst.pause).centi();
  if (shift <= 0) {
    r.certificate = "horizon: B_max - P = " + (inst.b_max - inst.pause).str() + " leaves no working time";
    return r;
  }
  const std::int64_t total = inst.total_service().centi();
  const std::int64_t pollsters = std::max<std::int64_t>(1, detail::ceil_div(total, shift));
  const std::int64_t max_pollsters = static_cast<std::int64_t>(inst.num_days) * inst.num_pollsters;
  if (pollsters > max_pollsters) {
    r.certificate = "pollsters: total service " + inst.total_service().str() + " needs at least " +
                    std::to_string(pollsters) + " pollster-days of " + (inst.b_max - inst.pause).str() +
                    " minutes, only " + std::to_string(max_pollsters) + " available";
    return r;
  }
  const std::int64_t days = detail::ceil_div(pollsters, inst.num_pollsters);
  const std::int64_t vehicles = std::max(days, detail::ceil_div(pollsters, inst.capacity));
  if (vehicles > days * inst.num_vehicles) {
    r.certificate = "vehicles: " + std::to_string(pollsters) + " pollsters at capacity " +
                    std::to_string(inst.capacity) + " need " + std::to_string(vehicles) + " vehicle-days, only " +
                    std::to_string(days * inst.num_vehicles) + " available over " + std::to_string(days) + " days";
    return r;
  }
  LowerBound lb;
  lb.counts = {static_cast<int>(days), static_cast<int>(vehicles), static_cast<int>(pollsters)};
  lb.cost = inst.costs.day * static_cast<double>(days) + inst.costs.vehicle * static_cast<double>(vehicles) +
            inst.costs.pollster * static_cast<double>(pollsters);
  r.bound = lb;
  return r;
}

inline ResourceBounds compute_bounds(const Instance& inst) { return {upper_bound_resources(inst), lower_bound_resources(inst)}; }

/// A row over model variable names; converted to indices by the model builder.
struct NamedRow {
  std::string name;
  std::string family;
  std::vector<std::pair<std::string, double>> terms;
  Sense sense = Sense::GreaterEq;
  double rhs = 0;
};

/// Day, vehicle and pollster count cuts implied by the lower bounds.
inline std::vector<NamedRow> lower_bound_cuts(const Instance& inst, const LowerBound& lb) {
  NamedRow days{"c9a", "c9a", {}, Sense::GreaterEq, static_cast<double>(lb.counts.days)};
  NamedRow vehicles{"c9b", "c9b", {}, Sense::GreaterEq, static_cast<double>(lb.counts.vehicles)};
  NamedRow pollsters{"c9c", "c9c", {}, Sense::GreaterEq, static_cast<double>(lb.counts.pollsters)};
  for (int s = 0; s < inst.num_days; ++s) {
    days.terms.push_back({names::u(s), 1});
    for (int j = 1; j <= inst.n; ++j) {
      for (int k = 0; k < inst.num_vehicles; ++k) vehicles.terms.push_back({names::y(0, j, k, s), 1});
      for (int e = 0; e < inst.num_pollsters; ++e) pollsters.terms.push_back({names::z(0, j, e, s), 1});
    }
  }
  return {days, vehicles, pollsters};
}

inline Json to_json(const ResourceBounds& b) {
  Json j;
  if (b.upper)
    j["upper"] = {{"days", b.upper->counts.days},
                  {"vehicles", b.upper->counts.vehicles},
                  {"pollsters", b.upper->counts.pollsters},
                  {"objective", b.upper->objective}};
  else
    j["upper"] = {{"infeasible", "no resource triple certifies a feasible plan bound"}};
  if (b.lower.bound)
    j["lower"] = {{"days", b.lower.bound->counts.days},
                  {"vehicles", b.lower.bound->counts.vehicles},
                  {"pollsters", b.lower.bound->counts.pollsters},
                  {"cost", b.lower.bound->cost}};
  else
    j["lower"] = {{"infeasible", b.lower.certificate}};
  return j;
}

}  // namespace ivprp
