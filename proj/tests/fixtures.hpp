#pragma once

#include <random>
#include <string>
#include <vector>

#include "ivprp/instance.hpp"
#include "ivprp/plan.hpp"

namespace fixtures {

using ivprp::Minutes;

inline std::vector<Minutes> row(std::initializer_list<double> v) {
  std::vector<Minutes> r;
  for (double x : v) r.push_back(Minutes::from_double(x));
  return r;
}

/// The four-store reference instance (two days, two vehicles, two pollsters).
inline ivprp::Instance four_stores() {
  ivprp::Instance in;
  in.n = 4;
  in.num_days = 2;
  in.num_pollsters = 2;
  in.num_vehicles = 2;
  in.capacity = 2;
  in.b_max = Minutes::whole(30);
  in.pause = Minutes::whole(1);
  in.t0 = Minutes::whole(20);
  in.t1 = Minutes::whole(30);
  in.costs = {300, 100, 80};
  in.service = row({1, 17, 1, 1});
  in.walk = {row({0, 2, 3, 14}), row({2, 0, 8, 20}), row({3, 8, 0, 15}), row({15, 20, 15, 0})};
  in.drive_store = {row({0, 1, 2, 10}), row({1, 0, 4, 15}), row({2, 5, 0, 9}), row({15, 11, 9, 0})};
  in.drive_out = row({1, 4, 6, 2});
  in.drive_in = row({2, 1, 7, 1});
  return in;
}

/// Its optimal one-day plan: one vehicle, two pollsters.
inline ivprp::Plan four_stores_plan() {
  using ivprp::Leg;
  ivprp::DayPlan d;
  d.active = true;
  d.vehicles.push_back({0, 0, {0, 1, 4, 8, 3, 7, 6, 9}});
  d.pollsters.push_back({0, 0, {Leg::ride(0, {0, 1}), Leg::walk({1, 5, 2, 6}), Leg::ride(0, {6, 9})}, 2});
  d.pollsters.push_back({1, 0,
                         {Leg::ride(0, {0, 1, 4}), Leg::walk({4, 8}), Leg::ride(0, {8, 3}), Leg::walk({3, 7}),
                          Leg::ride(0, {7, 6, 9})},
                         3});
  ivprp::Plan p;
  p.days = {d, ivprp::DayPlan{}};
  return p;
}

/// n stores with uniform times; every drive/walk `travel`, service `service`.
inline ivprp::Instance uniform(int n, double service, double travel, double b_max, double pause = 0) {
  ivprp::Instance in;
  in.n = n;
  in.b_max = Minutes::from_double(b_max);
  in.pause = Minutes::from_double(pause);
  in.t0 = Minutes{};
  in.t1 = Minutes::from_double(b_max - pause);
  in.costs = {200, 100, 40};
  in.service.assign(static_cast<std::size_t>(n), Minutes::from_double(service));
  in.walk.assign(static_cast<std::size_t>(n), std::vector<Minutes>(static_cast<std::size_t>(n), Minutes::from_double(travel)));
  in.drive_store = in.walk;
  in.drive_out.assign(static_cast<std::size_t>(n), Minutes::from_double(travel));
  in.drive_in = in.drive_out;
  return in;
}

}  // namespace fixtures

namespace fixtures {

/// Small random instance with integral times; not tied to the generator module.
template <class Rng>
ivprp::Instance random_small(Rng& rng, int n, double b_max = 60, double pause = 4) {
  std::uniform_int_distribution<int> travel(1, 9), service(1, 12);
  ivprp::Instance in = uniform(n, 1, 1, b_max, pause);
  for (auto& t : in.service) t = Minutes::whole(service(rng));
  for (int i = 0; i < n; ++i) {
    in.drive_out[static_cast<std::size_t>(i)] = Minutes::whole(travel(rng));
    in.drive_in[static_cast<std::size_t>(i)] = Minutes::whole(travel(rng));
    for (int j = 0; j < n; ++j) {
      in.walk[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Minutes::whole(i == j ? 0 : travel(rng) + 2);
      in.drive_store[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Minutes::whole(i == j ? 0 : travel(rng));
    }
  }
  in.t0 = Minutes::from_double((b_max - pause) / 4);
  in.t1 = Minutes::from_double(3 * (b_max - pause) / 4);
  return in;
}

}  // namespace fixtures
