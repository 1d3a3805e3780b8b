#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ivprp/minutes.hpp"

namespace ivprp {

using Json = nlohmann::json;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Costs {
  double day = 0;
  double vehicle = 0;
  double pollster = 0;
};

/// Problem data. Stores are numbered 1..n as arrival nodes, n+1..2n as their
/// departure copies, with the depot at node 0 and its copy at node 2n+1.
struct Instance {
  int n = 0;
  int num_days = 1;
  int num_pollsters = 1;
  int num_vehicles = 1;
  int capacity = 1;
  Minutes b_max;
  Minutes pause;
  Minutes t0;
  Minutes t1;
  Costs costs;
  std::vector<Minutes> service;                   // per store
  std::vector<std::vector<Minutes>> walk;         // store x store, diagonal unused
  std::vector<std::vector<Minutes>> drive_store;  // store x store, diagonal unused
  std::vector<Minutes> drive_out;                 // depot -> store
  std::vector<Minutes> drive_in;                  // store -> depot copy
  std::optional<std::vector<std::array<double, 2>>> coords;

  int depot() const { return 0; }
  int depot_copy() const { return 2 * n + 1; }
  int num_nodes() const { return 2 * n + 2; }
  bool is_arrival(int v) const { return v >= 1 && v <= n; }
  bool is_departure(int v) const { return v > n && v <= 2 * n; }
  bool is_store_node(int v) const { return v >= 1 && v <= 2 * n; }
  /// 1-based store id of an arrival or departure node.
  int store_of(int v) const { return v <= n ? v : v - n; }

  Minutes service_time(int i) const { return service[static_cast<std::size_t>(store_of(i) - 1)]; }
  /// Pedestrian time of walking arc (i, j), i a departure node and j an arrival node.
  Minutes walk_time(int i, int j) const {
    return walk[static_cast<std::size_t>(store_of(i) - 1)][static_cast<std::size_t>(j - 1)];
  }
  /// Vehicle time on a vehicular arc; zero on the service arcs (i, i+n).
  Minutes drive_time(int i, int j) const {
    if (i == 0) return drive_out[static_cast<std::size_t>(store_of(j) - 1)];
    if (j == depot_copy()) return drive_in[static_cast<std::size_t>(store_of(i) - 1)];
    if (is_arrival(i) && j == i + n) return Minutes{};
    return drive_store[static_cast<std::size_t>(store_of(i) - 1)]
                      [static_cast<std::size_t>(store_of(j) - 1)];
  }
  Minutes total_service() const {
    Minutes s;
    for (Minutes t : service) s += t;
    return s;
  }
};

// -- arc-set membership rules ----------------------------------------------

inline bool is_service_arc(int n, int i, int j) { return i >= 1 && i <= n && j == i + n; }

inline bool is_walking_arc(int n, int i, int j) {
  return i > n && i <= 2 * n && j >= 1 && j <= n && i != j + n;
}

inline bool is_vehicular_arc(int n, int i, int j) {
  auto in_c = [n](int v) { return v >= 1 && v <= 2 * n; };
  if (i == 0) return j >= 1 && j <= n;
  if (j == 2 * n + 1) return i > n && i <= 2 * n;
  return in_c(i) && in_c(j) && i != j && i != j + n;
}

struct Arc {
  int from = 0;
  int to = 0;
  Minutes time;
};

/// Node-duplicated multigraph with service, walking and vehicular arc sets.
struct Multigraph {
  int n = 0;
  std::vector<Arc> service;
  std::vector<Arc> walking;
  std::vector<Arc> vehicular;

  int num_nodes() const { return 2 * n + 2; }
};

inline Multigraph build_multigraph(const Instance& inst) {
  Multigraph g;
  g.n = inst.n;
  const int n = inst.n;
  for (int i = 1; i <= n; ++i) g.service.push_back({i, i + n, inst.service_time(i)});
  for (int i = n + 1; i <= 2 * n; ++i)
    for (int j = 1; j <= n; ++j)
      if (is_walking_arc(n, i, j)) g.walking.push_back({i, j, inst.walk_time(i, j)});
  for (int i = 0; i <= 2 * n + 1; ++i)
    for (int j = 0; j <= 2 * n + 1; ++j)
      if (is_vehicular_arc(n, i, j)) g.vehicular.push_back({i, j, inst.drive_time(i, j)});
  return g;
}

/// Big-M constant: one minute above the largest arc time plus the day length.
inline Minutes big_m(const Instance& inst) {
  Minutes mx;
  const Multigraph g = build_multigraph(inst);
  for (const auto* arcs : {&g.service, &g.walking, &g.vehicular})
    for (const Arc& a : *arcs) mx = std::max(mx, a.time);
  return mx + inst.b_max + Minutes::whole(1);
}

// -- validation & JSON --------------------------------------------------------

struct InstanceValidation {
  std::optional<Instance> instance;
  std::vector<std::string> errors;
  bool ok() const { return instance.has_value(); }
};

namespace detail {

inline bool read_number(const Json& j, const char* key, double& out, std::vector<std::string>& errors) {
  if (!j.contains(key) || !j[key].is_number()) {
    errors.push_back(std::string("missing or non-numeric field '") + key + "'");
    return false;
  }
  out = j[key].get<double>();
  return true;
}

inline bool read_int(const Json& j, const char* key, int& out, std::vector<std::string>& errors) {
  if (!j.contains(key) || !j[key].is_number_integer()) {
    errors.push_back(std::string("missing or non-integer field '") + key + "'");
    return false;
  }
  out = j[key].get<int>();
  return true;
}

inline bool read_vector(const Json& j, const char* key, int n, std::vector<Minutes>& out,
                        std::vector<std::string>& errors) {
  if (!j.contains(key) || !j[key].is_array()) {
    errors.push_back(std::string("missing array '") + key + "'");
    return false;
  }
  const Json& a = j[key];
  if (static_cast<int>(a.size()) != n) {
    errors.push_back(std::string("dimension mismatch: '") + key + "' has " +
                     std::to_string(a.size()) + " entries, expected n=" + std::to_string(n));
    return false;
  }
  out.clear();
  for (const Json& v : a) {
    if (!v.is_number()) {
      errors.push_back(std::string("non-numeric entry in '") + key + "'");
      return false;
    }
    out.push_back(Minutes::from_double(v.get<double>()));
  }
  return true;
}

inline bool read_matrix(const Json& j, const char* key, int n, std::vector<std::vector<Minutes>>& out,
                        std::vector<std::string>& errors) {
  if (!j.contains(key) || !j[key].is_array()) {
    errors.push_back(std::string("missing matrix '") + key + "'");
    return false;
  }
  const Json& a = j[key];
  if (static_cast<int>(a.size()) != n) {
    errors.push_back(std::string("dimension mismatch: '") + key + "' has " +
                     std::to_string(a.size()) + " rows, expected n=" + std::to_string(n));
    return false;
  }
  out.assign(static_cast<std::size_t>(n), {});
  for (int r = 0; r < n; ++r) {
    const Json& row = a[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      errors.push_back(std::string("dimension mismatch: '") + key + "' row " + std::to_string(r) +
                       " is not of length n=" + std::to_string(n));
      return false;
    }
    for (const Json& v : row) {
      if (!v.is_number()) {
        errors.push_back(std::string("non-numeric entry in '") + key + "'");
        return false;
      }
      out[static_cast<std::size_t>(r)].push_back(Minutes::from_double(v.get<double>()));
    }
  }
  return true;
}

}  // namespace detail

/// Checks every invariant of a populated instance; returns the violated ones.
inline std::vector<std::string> instance_errors(const Instance& inst) {
  std::vector<std::string> errors;
  const int n = inst.n;
  if (n < 1) errors.push_back("n must be at least 1");
  if (inst.capacity < 1) errors.push_back("capacity must be at least 1");
  if (inst.num_days < 1) errors.push_back("days must be at least 1");
  if (inst.num_pollsters < 1) errors.push_back("pollsters must be at least 1");
  if (inst.num_vehicles < 1) errors.push_back("vehicles must be at least 1");
  if (inst.costs.day < 0 || inst.costs.vehicle < 0 || inst.costs.pollster < 0)
    errors.push_back("negative cost coefficient");
  if (inst.pause < Minutes{}) errors.push_back("negative time: pause");
  if (inst.b_max < Minutes{}) errors.push_back("negative time: b_max");
  if (inst.t0 < Minutes{}) errors.push_back("negative time: break window start");
  if (inst.t0 > inst.t1) errors.push_back("break window start exceeds its end");
  if (inst.t1 > inst.b_max)
    errors.push_back("break window exceeds B_max - P: T1 = " + inst.t1.str() + " lies past the day end " +
                     inst.b_max.str());
  if (n < 1) return errors;

  auto sized = [n](std::size_t s) { return static_cast<int>(s) == n; };
  if (!sized(inst.service.size()) || !sized(inst.drive_out.size()) || !sized(inst.drive_in.size()) ||
      !sized(inst.walk.size()) || !sized(inst.drive_store.size())) {
    errors.push_back("dimension mismatch between time data and n");
    return errors;
  }
  for (int i = 0; i < n; ++i) {
    if (!sized(inst.walk[static_cast<std::size_t>(i)].size()) ||
        !sized(inst.drive_store[static_cast<std::size_t>(i)].size())) {
      errors.push_back("dimension mismatch in matrix row " + std::to_string(i));
      return errors;
    }
  }
  const Minutes zero;
  for (int i = 0; i < n; ++i) {
    const auto si = static_cast<std::size_t>(i);
    if (inst.service[si] <= zero)
      errors.push_back("service time of store " + std::to_string(i + 1) + " must be positive");
    if (inst.drive_out[si] < zero || inst.drive_in[si] < zero)
      errors.push_back("negative time: depot drive for store " + std::to_string(i + 1));
    else if (inst.drive_out[si] == zero || inst.drive_in[si] == zero)
      errors.push_back("zero drive time on depot arc of store " + std::to_string(i + 1));
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto sj = static_cast<std::size_t>(j);
      if (inst.walk[si][sj] <= zero)
        errors.push_back("walk time " + std::to_string(i + 1) + "->" + std::to_string(j + 1) +
                         " must be positive");
      if (inst.drive_store[si][sj] < zero)
        errors.push_back("negative time: drive " + std::to_string(i + 1) + "->" + std::to_string(j + 1));
      else if (inst.drive_store[si][sj] == zero)
        errors.push_back("zero drive time " + std::to_string(i + 1) + "->" + std::to_string(j + 1) +
                         " outside a service arc");
    }
  }
  if (inst.coords && static_cast<int>(inst.coords->size()) != n)
    errors.push_back("dimension mismatch: coords");
  return errors;
}

inline InstanceValidation validate_instance(const Json& raw) {
  InstanceValidation out;
  auto& errors = out.errors;
  if (!raw.is_object()) {
    errors.push_back("instance must be a JSON object");
    return out;
  }
  Instance inst;
  bool ok = detail::read_int(raw, "n", inst.n, errors);
  ok &= detail::read_int(raw, "days", inst.num_days, errors);
  ok &= detail::read_int(raw, "pollsters", inst.num_pollsters, errors);
  ok &= detail::read_int(raw, "vehicles", inst.num_vehicles, errors);
  ok &= detail::read_int(raw, "capacity", inst.capacity, errors);
  double b_max = 0, pause = 0;
  ok &= detail::read_number(raw, "b_max", b_max, errors);
  ok &= detail::read_number(raw, "pause", pause, errors);
  inst.b_max = Minutes::from_double(b_max);
  inst.pause = Minutes::from_double(pause);
  if (!raw.contains("break_window") || !raw["break_window"].is_array() || raw["break_window"].size() != 2 ||
      !raw["break_window"][0].is_number() || !raw["break_window"][1].is_number()) {
    errors.push_back("break_window must be a pair of numbers");
    ok = false;
  } else {
    inst.t0 = Minutes::from_double(raw["break_window"][0].get<double>());
    inst.t1 = Minutes::from_double(raw["break_window"][1].get<double>());
  }
  if (!raw.contains("costs") || !raw["costs"].is_object()) {
    errors.push_back("missing object 'costs'");
    ok = false;
  } else {
    const Json& c = raw["costs"];
    ok &= detail::read_number(c, "day", inst.costs.day, errors);
    ok &= detail::read_number(c, "vehicle", inst.costs.vehicle, errors);
    ok &= detail::read_number(c, "pollster", inst.costs.pollster, errors);
  }
  if (!ok) return out;
  if (inst.n < 1) {
    errors.push_back("n must be at least 1");
    return out;
  }
  ok &= detail::read_vector(raw, "service", inst.n, inst.service, errors);
  ok &= detail::read_matrix(raw, "walk", inst.n, inst.walk, errors);
  ok &= detail::read_matrix(raw, "drive_store", inst.n, inst.drive_store, errors);
  ok &= detail::read_vector(raw, "drive_depot_out", inst.n, inst.drive_out, errors);
  ok &= detail::read_vector(raw, "drive_depot_in", inst.n, inst.drive_in, errors);
  if (raw.contains("coords") && !raw["coords"].is_null()) {
    std::vector<std::array<double, 2>> coords;
    for (const Json& p : raw["coords"]) {
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        errors.push_back("coords entries must be [x, y] pairs");
        ok = false;
        break;
      }
      coords.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    inst.coords = std::move(coords);
  }
  if (!ok) return out;
  auto inv = instance_errors(inst);
  errors.insert(errors.end(), inv.begin(), inv.end());
  if (errors.empty()) out.instance = std::move(inst);
  return out;
}

inline Json to_json(const Instance& inst) {
  auto vec = [](const std::vector<Minutes>& v) {
    Json a = Json::array();
    for (Minutes m : v) a.push_back(m.value());
    return a;
  };
  auto mat = [&vec](const std::vector<std::vector<Minutes>>& m) {
    Json a = Json::array();
    for (const auto& row : m) a.push_back(vec(row));
    return a;
  };
  Json j;
  j["n"] = inst.n;
  j["days"] = inst.num_days;
  j["pollsters"] = inst.num_pollsters;
  j["vehicles"] = inst.num_vehicles;
  j["capacity"] = inst.capacity;
  j["b_max"] = inst.b_max.value();
  j["pause"] = inst.pause.value();
  j["break_window"] = {inst.t0.value(), inst.t1.value()};
  j["costs"] = {{"day", inst.costs.day}, {"vehicle", inst.costs.vehicle}, {"pollster", inst.costs.pollster}};
  j["service"] = vec(inst.service);
  j["walk"] = mat(inst.walk);
  j["drive_store"] = mat(inst.drive_store);
  j["drive_depot_out"] = vec(inst.drive_out);
  j["drive_depot_in"] = vec(inst.drive_in);
  if (inst.coords) {
    Json c = Json::array();
    for (const auto& p : *inst.coords) c.push_back({p[0], p[1]});
    j["coords"] = c;
  }
  return j;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

/// Loads and validates an instance file; throws with every violation listed.
inline Instance load_instance(const std::string& path) {
  auto v = validate_instance(read_json_file(path));
  if (!v.ok()) {
    std::ostringstream msg;
    msg << path << ": invalid instance";
    for (const auto& e : v.errors) msg << "; " << e;
    throw Error(msg.str());
  }
  return *v.instance;
}

}  // namespace ivprp
