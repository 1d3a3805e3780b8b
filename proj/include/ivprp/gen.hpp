#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "ivprp/bounds.hpp"
#include "ivprp/instance.hpp"

namespace ivprp {

struct GenParams {
  int n = 10;
  std::uint64_t seed = 1;
  double radius_m = 1000;
  double vehicle_kmh = 30;
  double walk_kmh = 5;
  double service_lo = 1;
  double service_hi = 20;
  double eta_max = 0.3;
  Costs costs{200, 100, 40};
  double b_max = 100;
  double pause = 10;
  int capacity = 1;
  /// (|K|, |E|, |S|); sized with the upper-bound program when absent.
  std::optional<std::array<int, 3>> resources;
  std::array<int, 3> sizing_box{3, 5, 15};
};

struct PresetRow {
  int n, vehicles, pollsters, days;
  double b_max, pause;
  int capacity;
};

inline const std::array<PresetRow, 10>& preset_rows() {
  static const std::array<PresetRow, 10> rows{{
      {10, 3, 3, 1, 100, 10, 1},
      {12, 2, 2, 2, 100, 10, 1},
      {14, 2, 2, 2, 100, 10, 1},
      {16, 2, 3, 2, 100, 10, 2},
      {18, 2, 3, 2, 100, 10, 2},
      {20, 3, 4, 1, 150, 15, 2},
      {25, 2, 2, 2, 150, 15, 3},
      {30, 2, 2, 2, 200, 20, 3},
      {40, 2, 4, 2, 200, 20, 4},
      {50, 3, 5, 2, 250, 25, 4},
  }};
  return rows;
}

inline GenParams preset_params(int row, std::uint64_t seed) {
  if (row < 0 || row >= 10) throw Error("preset must be in 0..9, got " + std::to_string(row));
  const PresetRow& r = preset_rows()[static_cast<std::size_t>(row)];
  GenParams p;
  p.n = r.n;
  p.seed = seed;
  p.b_max = r.b_max;
  p.pause = r.pause;
  p.capacity = r.capacity;
  p.resources = std::array<int, 3>{r.vehicles, r.pollsters, r.days};
  return p;
}

inline void check_params(const GenParams& p) {
  if (p.n < 1) throw Error("n must be >= 1");
  if (!(p.vehicle_kmh > 0) || !(p.walk_kmh > 0)) throw Error("speeds must be positive");
  if (!(p.eta_max >= 0 && p.eta_max < 1)) throw Error("eta_max must lie in [0, 1)");
  if (!(p.radius_m > 0)) throw Error("radius must be positive");
  if (!(p.service_lo > 0 && p.service_lo <= p.service_hi)) throw Error("service range must satisfy 0 < lo <= hi");
  if (!(p.b_max > p.pause && p.pause >= 0)) throw Error("need B_max > P >= 0");
  if (p.capacity < 1) throw Error("capacity must be >= 1");
}

inline Instance generate_instance(const GenParams& p) {
  check_params(p);
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = p.n;
  const auto N = static_cast<std::size_t>(n);

  std::vector<std::array<double, 2>> pts(N);
  for (auto& q : pts) {
    const double r = p.radius_m * std::sqrt(unit(rng));
    const double a = 2 * M_PI * unit(rng);
    q = {r * std::cos(a), r * std::sin(a)};
  }
  auto minutes = [](double meters, double kmh) { return meters / (kmh * 1000.0 / 60.0); };
  auto clamp = [](double m) { return Minutes::from_double(std::max(0.01, m)); };
  auto drive = [&](double meters) { return clamp(minutes(meters, p.vehicle_kmh) * (1 + p.eta_max * unit(rng))); };

  Instance in;
  in.n = n;
  in.capacity = p.capacity;
  in.b_max = Minutes::from_double(p.b_max);
  in.pause = Minutes::from_double(p.pause);
  const Minutes shift = in.b_max - in.pause;
  in.t0 = Minutes::from_centi(shift.centi() / 4);
  in.t1 = Minutes::from_centi(shift.centi() * 3 / 4);
  in.costs = p.costs;
  in.service.resize(N);
  for (auto& t : in.service) t = Minutes::from_double(p.service_lo + (p.service_hi - p.service_lo) * unit(rng));
  in.walk.assign(N, std::vector<Minutes>(N));
  in.drive_store.assign(N, std::vector<Minutes>(N));
  in.drive_out.resize(N);
  in.drive_in.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    const double d0 = std::hypot(pts[i][0], pts[i][1]);
    in.drive_out[i] = drive(d0);
    in.drive_in[i] = drive(d0);
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      const double d = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
      in.drive_store[i][j] = drive(d);
      if (j > i) in.walk[i][j] = in.walk[j][i] = clamp(minutes(d, p.walk_kmh));
    }
  }
  in.coords = pts;

  if (p.resources) {
    in.num_vehicles = (*p.resources)[0];
    in.num_pollsters = (*p.resources)[1];
    in.num_days = (*p.resources)[2];
  } else {
    in.num_vehicles = p.sizing_box[0];
    in.num_pollsters = p.sizing_box[1];
    in.num_days = p.sizing_box[2];
    if (auto ub = upper_bound_resources(in)) {
      in.num_vehicles = ub->counts.vehicles;
      in.num_pollsters = ub->counts.pollsters;
      in.num_days = ub->counts.days;
    }
  }
  if (auto errs = instance_errors(in); !errs.empty()) throw Error("generated instance invalid: " + errs.front());
  return in;
}

/// The ten simulated-instance rows, row i drawn with seed + i.
inline std::vector<Instance> preset_suite(std::uint64_t seed) {
  std::vector<Instance> out;
  for (int r = 0; r < 10; ++r) out.push_back(generate_instance(preset_params(r, seed + static_cast<std::uint64_t>(r))));
  return out;
}

}  // namespace ivprp
