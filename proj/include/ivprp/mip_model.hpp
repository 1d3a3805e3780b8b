#pragma once

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "ivprp/bounds.hpp"
#include "ivprp/instance.hpp"
#include "ivprp/linear.hpp"
#include "ivprp/plan.hpp"

namespace ivprp {

struct ModelOptions {
  bool symmetry_breaking = false;
  bool lower_bound_cuts = false;
  bool valid_inequalities = false;
  bool reduced = false;  // single day, no pause, no break rows
  std::optional<ResourceTriple> cut_values;  // overrides the computed lower bounds
};

class MipModel {
 public:
  int n = 0;
  int num_days = 0;
  int num_pollsters = 0;
  int num_vehicles = 0;
  bool reduced = false;
  double big_m = 0;
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;

  int add_variable(std::string name, VarKind kind, double lo, double hi) {
    auto [it, fresh] = index_.emplace(name, static_cast<int>(variables.size()));
    if (!fresh) throw Error("duplicate variable " + name);
    variables.push_back({std::move(name), kind, lo, hi});
    return it->second;
  }
  std::optional<int> find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int at(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw Error("unknown variable " + name);
    return it->second;
  }

  int count(VarKind kind) const {
    int c = 0;
    for (const auto& v : variables) c += v.kind == kind;
    return c;
  }
  std::map<std::string, int> family_census() const {
    std::map<std::string, int> m;
    for (const auto& c : constraints) ++m[c.family];
    return m;
  }

 private:
  std::unordered_map<std::string, int> index_;
};

namespace detail {

/// Accumulates a row with merged duplicate terms and a constant moved to the
/// right-hand side on finish.
class RowBuilder {
 public:
  RowBuilder(std::string family, std::string name) : family_(std::move(family)), name_(std::move(name)) {}
  RowBuilder& add(std::optional<int> var, double coef) {
    if (!var || coef == 0) return *this;
    auto it = pos_.find(*var);
    if (it == pos_.end()) {
      pos_.emplace(*var, terms_.size());
      terms_.push_back({*var, coef});
    } else {
      terms_[it->second].coef += coef;
    }
    return *this;
  }
  RowBuilder& constant(double c) {
    constant_ += c;
    return *this;
  }
  Constraint finish(Sense sense, double rhs) {
    std::vector<Term> kept;
    for (const Term& t : terms_)
      if (t.coef != 0) kept.push_back(t);
    return {name_, family_, std::move(kept), sense, rhs - constant_};
  }

 private:
  std::string family_;
  std::string name_;
  std::vector<Term> terms_;
  std::map<int, std::size_t> pos_;
  double constant_ = 0;
};

inline std::string row_name(const char* family, std::initializer_list<int> idx) {
  std::string s = family;
  for (int i : idx) s += "_" + std::to_string(i);
  return s;
}

}  // namespace detail

/// Builds the routing integer program. Reduced mode yields the single-day
/// model without pauses or break rows used for half-shifts.
inline MipModel build_model(const Instance& inst, const ModelOptions& opts = {}) {
  using detail::RowBuilder;
  using detail::row_name;
  MipModel m;
  const int n = inst.n, sink = 2 * n + 1;
  const int S = opts.reduced ? 1 : inst.num_days, E = inst.num_pollsters, K = inst.num_vehicles;
  const double P = opts.reduced ? 0.0 : inst.pause.value();
  const bool breaks = !opts.reduced;
  const double M = big_m(inst).value();
  m.n = n;
  m.num_days = S;
  m.num_pollsters = E;
  m.num_vehicles = K;
  m.reduced = opts.reduced;
  m.big_m = M;

  const Multigraph g = build_multigraph(inst);
  std::vector<std::pair<int, int>> walk_arcs;  // A_S then A_W, sorted
  for (const Arc& a : g.service) walk_arcs.push_back({a.from, a.to});
  for (const Arc& a : g.walking) walk_arcs.push_back({a.from, a.to});
  std::sort(walk_arcs.begin(), walk_arcs.end());
  std::vector<std::vector<int>> v_in(static_cast<std::size_t>(g.num_nodes())), v_out(v_in.size());
  for (const Arc& a : g.vehicular) {
    v_out[static_cast<std::size_t>(a.from)].push_back(a.to);
    v_in[static_cast<std::size_t>(a.to)].push_back(a.from);
  }

  for (int s = 0; s < S; ++s) {
    for (int e = 0; e < E; ++e)
      for (auto [i, j] : walk_arcs) m.add_variable(names::x(i, j, e, s), VarKind::Binary, 0, 1);
    for (int k = 0; k < K; ++k)
      for (const Arc& a : g.vehicular) m.add_variable(names::y(a.from, a.to, k, s), VarKind::Binary, 0, 1);
    for (int e = 0; e < E; ++e)
      for (const Arc& a : g.vehicular) m.add_variable(names::z(a.from, a.to, e, s), VarKind::Binary, 0, 1);
    for (int e = 0; e < E; ++e) {
      for (int i = 1; i <= n; ++i) m.add_variable(names::b(i, e, s), VarKind::Binary, 0, 1);
      for (int i = n + 1; i <= 2 * n; ++i) m.add_variable(names::f(i, e, s), VarKind::Binary, 0, 1);
      if (breaks)
        for (int i = 1; i <= n; ++i) m.add_variable(names::w(i, e, s), VarKind::Binary, 0, 1);
    }
  }
  for (int s = 0; s < S; ++s) m.add_variable(names::u(s), VarKind::Binary, 0, 1);
  for (int i = 1; i <= 2 * n; ++i) m.add_variable(names::time(i), VarKind::Continuous, 0, M);

  auto X = [&m](int i, int j, int e, int s) { return m.find(names::x(i, j, e, s)); };
  auto Y = [&m](int i, int j, int k, int s) { return m.find(names::y(i, j, k, s)); };
  auto Z = [&m](int i, int j, int e, int s) { return m.find(names::z(i, j, e, s)); };
  auto Bv = [&m](int i, int e, int s) { return m.find(names::b(i, e, s)); };
  auto Fv = [&m](int i, int e, int s) { return m.find(names::f(i, e, s)); };
  auto Wv = [&m](int i, int e, int s) { return m.find(names::w(i, e, s)); };
  auto U = [&m](int s) { return m.find(names::u(s)); };
  auto T = [&m](int i) { return m.find(names::time(i)); };
  auto& rows = m.constraints;

  // objective
  {
    RowBuilder obj("obj", "obj");
    for (int s = 0; s < S; ++s) obj.add(U(s), inst.costs.day);
    for (int s = 0; s < S; ++s)
      for (int k = 0; k < K; ++k)
        for (int j : v_out[0]) obj.add(Y(0, j, k, s), inst.costs.vehicle);
    for (int s = 0; s < S; ++s)
      for (int e = 0; e < E; ++e)
        for (int j : v_out[0]) obj.add(Z(0, j, e, s), inst.costs.pollster);
    m.objective = obj.finish(Sense::Equal, 0).terms;
  }

  // pollster routing
  for (int i = 1; i <= n; ++i) {
    RowBuilder r("c2a", row_name("c2a", {i}));
    for (int s = 0; s < S; ++s)
      for (int e = 0; e < E; ++e) r.add(X(i, i + n, e, s), 1);
    rows.push_back(r.finish(Sense::Equal, 1));
  }
  for (int s = 0; s < S; ++s)
    for (int e = 0; e < E; ++e) {
      for (int i = 1; i <= n; ++i) {
        RowBuilder r("c2b", row_name("c2b", {i, e, s}));
        for (int j = n + 1; j <= 2 * n; ++j) r.add(X(j, i, e, s), 1);
        r.add(X(i, i + n, e, s), -1).add(Bv(i, e, s), 1);
        rows.push_back(r.finish(Sense::Equal, 0));
      }
      for (int i = n + 1; i <= 2 * n; ++i) {
        RowBuilder r("c2c", row_name("c2c", {i, e, s}));
        r.add(X(i - n, i, e, s), 1);
        for (int j = 1; j <= n; ++j) r.add(X(i, j, e, s), -1);
        r.add(Fv(i, e, s), -1);
        rows.push_back(r.finish(Sense::Equal, 0));
      }
      for (int i = 1; i <= n; ++i) {
        RowBuilder r("c2d", row_name("c2d", {i, e, s}));
        for (int j : v_in[static_cast<std::size_t>(i)]) r.add(Z(j, i, e, s), 1);
        r.add(X(i, i + n, e, s), 1).add(Bv(i, e, s), -1);
        rows.push_back(r.finish(Sense::LessEq, 1));
      }
      for (int i = n + 1; i <= 2 * n; ++i) {
        RowBuilder r("c2e", row_name("c2e", {i, e, s}));
        for (int j : v_out[static_cast<std::size_t>(i)]) r.add(Z(i, j, e, s), 1);
        r.add(X(i - n, i, e, s), 1).add(Fv(i, e, s), -1);
        rows.push_back(r.finish(Sense::LessEq, 1));
      }
      for (int i = 1; i <= 2 * n; ++i) {
        const bool arrival = i <= n;
        RowBuilder r(arrival ? "c2f" : "c2g", row_name(arrival ? "c2f" : "c2g", {i, e, s}));
        for (int j : v_in[static_cast<std::size_t>(i)]) r.add(Z(j, i, e, s), 1);
        for (int j : v_out[static_cast<std::size_t>(i)]) r.add(Z(i, j, e, s), -1);
        if (arrival)
          r.add(Bv(i, e, s), -1);
        else
          r.add(Fv(i, e, s), 1);
        rows.push_back(r.finish(Sense::Equal, 0));
      }
      RowBuilder r("c2h", row_name("c2h", {e, s}));
      for (int j : v_out[0]) r.add(Z(0, j, e, s), 1);
      r.add(U(s), -1);
      rows.push_back(r.finish(Sense::LessEq, 0));
    }

  // vehicle routing
  for (int s = 0; s < S; ++s) {
    for (int i = 1; i <= 2 * n; ++i) {
      const bool arrival = i <= n;
      RowBuilder r(arrival ? "c3a" : "c3b", row_name(arrival ? "c3a" : "c3b", {i, s}));
      for (int k = 0; k < K; ++k)
        for (int j : v_out[static_cast<std::size_t>(i)]) r.add(Y(i, j, k, s), 1);
      for (int e = 0; e < E; ++e) r.add(arrival ? Bv(i, e, s) : Fv(i, e, s), -1);
      rows.push_back(r.finish(Sense::Equal, 0));
    }
    for (int k = 0; k < K; ++k) {
      for (int j = 1; j <= 2 * n; ++j) {
        RowBuilder r("c3c", row_name("c3c", {j, k, s}));
        for (int i : v_in[static_cast<std::size_t>(j)]) r.add(Y(i, j, k, s), 1);
        for (int i : v_out[static_cast<std::size_t>(j)]) r.add(Y(j, i, k, s), -1);
        rows.push_back(r.finish(Sense::Equal, 0));
      }
      RowBuilder d("c3d", row_name("c3d", {k, s}));
      for (int j : v_out[0]) d.add(Y(0, j, k, s), 1);
      for (int j : v_in[static_cast<std::size_t>(sink)]) d.add(Y(j, sink, k, s), -1);
      rows.push_back(d.finish(Sense::Equal, 0));
      RowBuilder e3("c3e", row_name("c3e", {k, s}));
      for (int j : v_out[0]) e3.add(Y(0, j, k, s), 1);
      e3.add(U(s), -1);
      rows.push_back(e3.finish(Sense::LessEq, 0));
    }
    for (const Arc& a : g.vehicular) {
      RowBuilder r("c3f", row_name("c3f", {a.from, a.to, s}));
      for (int e = 0; e < E; ++e) r.add(Z(a.from, a.to, e, s), 1);
      for (int k = 0; k < K; ++k) r.add(Y(a.from, a.to, k, s), -static_cast<double>(inst.capacity));
      rows.push_back(r.finish(Sense::LessEq, 0));
    }
  }

  // time management
  for (int i = 1; i <= n; ++i) {
    RowBuilder r("c4a", row_name("c4a", {i}));
    r.add(T(i + n), 1).add(T(i), -1);
    if (breaks)
      for (int s = 0; s < S; ++s)
        for (int e = 0; e < E; ++e) r.add(Wv(i, e, s), -P);
    rows.push_back(r.finish(Sense::GreaterEq, inst.service_time(i).value()));
  }
  for (const Arc& a : g.walking) {
    RowBuilder r("c4b", row_name("c4b", {a.from, a.to}));
    r.add(T(a.to), 1).add(T(a.from), -1);
    for (int s = 0; s < S; ++s)
      for (int e = 0; e < E; ++e) r.add(X(a.from, a.to, e, s), -M);
    r.constant(M);
    rows.push_back(r.finish(Sense::GreaterEq, a.time.value()));
  }
  for (const Arc& a : g.vehicular) {
    if (a.from == 0 || a.to == sink) continue;
    RowBuilder r("c4c", row_name("c4c", {a.from, a.to}));
    r.add(T(a.to), 1).add(T(a.from), -1);
    for (int s = 0; s < S; ++s)
      for (int k = 0; k < K; ++k) r.add(Y(a.from, a.to, k, s), -M);
    r.constant(M);
    rows.push_back(r.finish(Sense::GreaterEq, a.time.value()));
  }
  for (int i = 1; i <= 2 * n; ++i) {
    RowBuilder r("c4d", row_name("c4d", {i}));
    r.add(T(i), 1);
    for (int s = 0; s < S; ++s)
      for (int k = 0; k < K; ++k) r.add(Y(0, i, k, s), -M);
    r.constant(M);
    rows.push_back(r.finish(Sense::GreaterEq, inst.drive_time(0, i).value()));
  }
  for (int s = 0; s < S; ++s)
    for (int i = 1; i <= 2 * n; ++i) {
      RowBuilder r("c4e", row_name("c4e", {i, s}));
      r.add(T(i), 1).add(U(s), -inst.b_max.value());
      for (int k = 0; k < K; ++k) r.add(Y(i, sink, k, s), M);
      r.constant(-M);
      rows.push_back(r.finish(Sense::LessEq, -inst.drive_time(i, sink).value()));
    }

  // breaks
  if (breaks) {
    for (int i = 1; i <= n; ++i) {
      const double t = inst.service_time(i).value();
      RowBuilder lo("c5a", row_name("c5a_lo", {i}));
      RowBuilder hi("c5a", row_name("c5a_hi", {i}));
      lo.add(T(i), 1);
      hi.add(T(i), 1);
      for (int s = 0; s < S; ++s)
        for (int e = 0; e < E; ++e) {
          lo.add(Wv(i, e, s), -inst.t0.value());
          hi.add(Wv(i, e, s), M);
        }
      rows.push_back(lo.finish(Sense::GreaterEq, -t));
      hi.constant(-M);
      rows.push_back(hi.finish(Sense::LessEq, inst.t1.value() - t));
    }
    for (int s = 0; s < S; ++s)
      for (int e = 0; e < E; ++e) {
        for (int i = 1; i <= n; ++i) {
          RowBuilder r("c5b", row_name("c5b", {i, e, s}));
          r.add(Wv(i, e, s), 1).add(X(i, i + n, e, s), -1);
          rows.push_back(r.finish(Sense::LessEq, 0));
        }
        RowBuilder r("c5c", row_name("c5c", {e, s}));
        for (int i = 1; i <= n; ++i) r.add(Wv(i, e, s), 1);
        for (int j : v_out[0]) r.add(Z(0, j, e, s), -1);
        rows.push_back(r.finish(Sense::Equal, 0));
      }
  }

  // symmetry breaking
  if (opts.symmetry_breaking) {
    auto departures = [&](RowBuilder& r, bool vehicle, int who, int s, double c) {
      for (int j : v_out[0]) r.add(vehicle ? Y(0, j, who, s) : Z(0, j, who, s), c);
    };
    {
      RowBuilder r("c6a", "c6a");
      departures(r, false, 0, 0, 1);
      rows.push_back(r.finish(Sense::Equal, 1));
    }
    for (int s = 0; s < S; ++s)
      for (int e = 1; e < E; ++e) {
        RowBuilder r("c6b", row_name("c6b", {e, s}));
        departures(r, false, e, s, 1);
        departures(r, false, e - 1, s, -1);
        rows.push_back(r.finish(Sense::LessEq, 0));
      }
    if (!opts.reduced)
      for (int s = 1; s < S; ++s)
        for (int e = 0; e < E; ++e) {
          RowBuilder r("c6c", row_name("c6c", {e, s}));
          departures(r, false, e, s, 1);
          departures(r, false, e, s - 1, -1);
          rows.push_back(r.finish(Sense::LessEq, 0));
        }
    {
      RowBuilder r("c6d", "c6d");
      departures(r, true, 0, 0, 1);
      rows.push_back(r.finish(Sense::Equal, 1));
    }
    for (int s = 0; s < S; ++s)
      for (int k = 1; k < K; ++k) {
        RowBuilder r("c6e", row_name("c6e", {k, s}));
        departures(r, true, k, s, 1);
        departures(r, true, k - 1, s, -1);
        rows.push_back(r.finish(Sense::LessEq, 0));
      }
    if (!opts.reduced) {
      for (int s = 1; s < S; ++s)
        for (int k = 0; k < K; ++k) {
          RowBuilder r("c6f", row_name("c6f", {k, s}));
          departures(r, true, k, s, 1);
          departures(r, true, k, s - 1, -1);
          rows.push_back(r.finish(Sense::LessEq, 0));
        }
      for (int s = 1; s < S; ++s) {
        for (int i = 1; i <= n; ++i) {
          RowBuilder r("c6g", row_name("c6g", {i, s}));
          for (int e = 0; e < E; ++e) r.add(Bv(i, e, s), 1).add(Bv(i, e, s - 1), 1);
          rows.push_back(r.finish(Sense::LessEq, 1));
        }
        for (int i = n + 1; i <= 2 * n; ++i) {
          RowBuilder r("c6h", row_name("c6h", {i, s}));
          for (int e = 0; e < E; ++e) r.add(Fv(i, e, s), 1).add(Fv(i, e, s - 1), 1);
          rows.push_back(r.finish(Sense::LessEq, 1));
        }
        for (int i = 1; i <= n; ++i) {
          RowBuilder r("c6i", row_name("c6i", {i, s}));
          for (int e = 0; e < E; ++e) {
            for (int j = n + 1; j <= 2 * n; ++j) r.add(X(j, i, e, s), 1);
            r.add(Bv(i, e, s - 1), 1);
          }
          rows.push_back(r.finish(Sense::LessEq, 1));
        }
        for (int i = n + 1; i <= 2 * n; ++i) {
          RowBuilder r("c6j", row_name("c6j", {i, s}));
          for (int e = 0; e < E; ++e) {
            for (int j = 1; j <= n; ++j) r.add(X(i, j, e, s), 1);
            r.add(Fv(i, e, s - 1), 1);
          }
          rows.push_back(r.finish(Sense::LessEq, 1));
        }
        for (int e = 1; e < E; ++e) {
          RowBuilder rk("c6k", row_name("c6k", {e, s}));
          RowBuilder rl("c6l", row_name("c6l", {e, s}));
          for (int i = 1; i <= n; ++i) {
            rk.add(Bv(i, e, s), 1);
            rl.add(Fv(i + n, e, s), 1);
            for (int r = 0; r < s; ++r) {
              rk.add(Bv(i, e - 1, r), 1);
              rl.add(Fv(i + n, e - 1, r), 1);
            }
          }
          rows.push_back(rk.finish(Sense::LessEq, n));
          rows.push_back(rl.finish(Sense::LessEq, n));
        }
        RowBuilder r("c6m", row_name("c6m", {s}));
        r.add(U(s), 1).add(U(s - 1), -1);
        rows.push_back(r.finish(Sense::LessEq, 0));
      }
    }
  }

  // lower-bound cuts
  if (opts.lower_bound_cuts) {
    ResourceTriple cut;
    if (opts.cut_values) {
      cut = *opts.cut_values;
    } else if (auto lb = lower_bound_resources(inst); lb.bound) {
      cut = lb.bound->counts;
    } else {
      cut = {S + 1, 0, 0};  // certificate of infeasibility: more days than exist
    }
    for (const NamedRow& nr : lower_bound_cuts(inst, LowerBound{cut, 0})) {
      RowBuilder r(nr.family, nr.name);
      for (const auto& [name, coef] : nr.terms) r.add(m.find(name), coef);
      rows.push_back(r.finish(nr.sense, nr.rhs));
    }
  }

  // valid inequalities of the reduced model
  if (opts.valid_inequalities) {
    RowBuilder r("c10a", "c10a");
    for (int i = 1; i <= n; ++i) r.add(T(i + n), 1).add(T(i), -1);
    rows.push_back(r.finish(Sense::LessEq, static_cast<double>(E) * inst.b_max.value()));
    for (int i = 1; i <= n; ++i) {
      RowBuilder v("c10b", row_name("c10b", {i}));
      v.add(T(i), 1).add(T(i + n), -1);
      rows.push_back(v.finish(Sense::LessEq, 0));
    }
  }
  return m;
}

// -- LP text -------------------------------------------------------------------

namespace detail {

inline std::string num(double v) {
  if (v == 0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

class LineWrapper {
 public:
  explicit LineWrapper(std::ostream& os) : os_(os) {}
  void token(const std::string& t) {
    if (len_ > 0 && len_ + 1 + t.size() > 78) {
      os_ << "\n   ";
      len_ = 3;
    } else if (len_ > 0) {
      os_ << ' ';
      ++len_;
    }
    os_ << t;
    len_ += t.size();
  }
  void start(const std::string& head) {
    os_ << ' ' << head;
    len_ = head.size() + 1;
  }
  void end() {
    os_ << '\n';
    len_ = 0;
  }

 private:
  std::ostream& os_;
  std::size_t len_ = 0;
};

inline void emit_terms(LineWrapper& w, const MipModel& m, const std::vector<Term>& terms) {
  bool first = true;
  for (const Term& t : terms) {
    const double a = std::fabs(t.coef);
    std::string sign = t.coef < 0 ? "-" : (first ? "" : "+");
    if (!sign.empty()) w.token(sign);
    if (a != 1) w.token(num(a));
    w.token(m.variables[static_cast<std::size_t>(t.var)].name);
    first = false;
  }
  if (terms.empty()) w.token("0 " + m.variables.front().name);
}

}  // namespace detail

/// Writes the model in CPLEX LP syntax. Output is a pure function of the model.
inline void emit_lp(const MipModel& m, std::ostream& os) {
  os << "\\ IVPRP model n=" << m.n << " days=" << m.num_days << " pollsters=" << m.num_pollsters
     << " vehicles=" << m.num_vehicles << (m.reduced ? " reduced" : "") << "\n";
  detail::LineWrapper w(os);
  os << "Minimize\n";
  w.start("obj:");
  detail::emit_terms(w, m, m.objective);
  w.end();
  os << "Subject To\n";
  for (const Constraint& c : m.constraints) {
    w.start(c.name + ":");
    detail::emit_terms(w, m, c.terms);
    w.token(c.sense == Sense::LessEq ? "<=" : c.sense == Sense::GreaterEq ? ">=" : "=");
    w.token(detail::num(c.rhs));
    w.end();
  }
  os << "Bounds\n";
  for (const Variable& v : m.variables)
    if (v.kind == VarKind::Continuous) os << ' ' << detail::num(v.lower) << " <= " << v.name << " <= " << detail::num(v.upper) << '\n';
  os << "Binary\n";
  for (const Variable& v : m.variables)
    if (v.kind == VarKind::Binary) w.token(v.name);
  w.end();
  os << "End\n";
  if (!os) throw Error("failed writing LP text");
}

inline std::string emit_lp(const MipModel& m) {
  std::ostringstream os;
  emit_lp(m, os);
  return os.str();
}

// -- assignments ------------------------------------------------------------------

using Assignment = std::map<std::string, double>;

struct SolutionFile {
  Assignment values;
  std::optional<std::string> status;
  std::optional<double> gap;
};

/// Parses `name value` lines; `#` starts a comment, and comments of the form
/// `# status: optimal` or `# gap: 0.01` are captured.
inline SolutionFile parse_assignment_text(const std::string& text) {
  SolutionFile out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) {
      std::string comment = line.substr(hash + 1);
      auto colon = comment.find(':');
      if (colon != std::string::npos) {
        std::istringstream key_in(comment.substr(0, colon));
        std::string key;
        key_in >> key;
        std::istringstream val_in(comment.substr(colon + 1));
        if (key == "status") {
          std::string v;
          val_in >> v;
          out.status = v;
        } else if (key == "gap") {
          double g;
          if (val_in >> g) out.gap = g;
        }
      }
      line.resize(hash);
    }
    std::istringstream ls(line);
    std::string name, value;
    if (!(ls >> name)) continue;
    if (!(ls >> value)) throw Error("solution line " + std::to_string(lineno) + ": missing value for " + name);
    try {
      std::size_t used = 0;
      double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      out.values[name] = v;
    } catch (const std::exception&) {
      throw Error("solution line " + std::to_string(lineno) + ": bad value '" + value + "'");
    }
  }
  return out;
}

struct RowViolation {
  std::string row;
  double activity;
  double rhs;
};

/// Rows not satisfied by a full assignment (missing names count as 0).
inline std::vector<RowViolation> row_violations(const MipModel& m, const Assignment& a, double tol = 1e-6) {
  std::vector<double> val(m.variables.size(), 0.0);
  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    auto it = a.find(m.variables[i].name);
    if (it != a.end()) val[i] = it->second;
  }
  std::vector<RowViolation> out;
  for (const Constraint& c : m.constraints) {
    double act = 0;
    for (const Term& t : c.terms) act += t.coef * val[static_cast<std::size_t>(t.var)];
    const bool ok = c.sense == Sense::LessEq      ? act <= c.rhs + tol
                    : c.sense == Sense::GreaterEq ? act >= c.rhs - tol
                                                  : std::fabs(act - c.rhs) <= tol;
    if (!ok) out.push_back({c.name, act, c.rhs});
  }
  for (std::size_t i = 0; i < m.variables.size(); ++i) {
    const Variable& v = m.variables[i];
    if (val[i] < v.lower - tol || val[i] > v.upper + tol) out.push_back({"bound:" + v.name, val[i], v.upper});
  }
  return out;
}

inline double objective_value(const MipModel& m, const Assignment& a) {
  double obj = 0;
  for (const Term& t : m.objective) {
    auto it = a.find(m.variables[static_cast<std::size_t>(t.var)].name);
    if (it != a.end()) obj += t.coef * it->second;
  }
  return obj;
}

/// Binary part of a plan in model variables (single-shift days only). Time
/// variables are added from the plan's tightest schedule when it exists.
inline Assignment encode_plan(const Instance& inst, const Plan& plan, bool with_times = true) {
  Assignment a;
  const int n = inst.n;
  for (std::size_t sd = 0; sd < plan.days.size(); ++sd) {
    const int s = static_cast<int>(sd);
    const DayPlan& day = plan.days[sd];
    if (day.split) throw Error("split days have no single-shift encoding");
    if (day.active) a[names::u(s)] = 1;
    for (const VehicleRoute& r : day.vehicles)
      for (std::size_t i = 0; i + 1 < r.nodes.size(); ++i) a[names::y(r.nodes[i], r.nodes[i + 1], r.vehicle, s)] = 1;
    for (const ServiceRoute& r : day.pollsters) {
      const int e = r.pollster;
      for (const Leg& leg : r.legs) {
        for (std::size_t i = 0; i + 1 < leg.nodes.size(); ++i) {
          const int from = leg.nodes[i], to = leg.nodes[i + 1];
          a[leg.kind == LegKind::Ride ? names::z(from, to, e, s) : names::x(from, to, e, s)] = 1;
        }
        if (leg.kind == LegKind::Walk && !leg.nodes.empty()) {
          a[names::b(leg.nodes.front(), e, s)] = 1;
          a[names::f(leg.nodes.back(), e, s)] = 1;
        }
      }
      if (r.break_store) a[names::w(*r.break_store, e, s)] = 1;
    }
  }
  if (with_times) {
    try {
      const Schedule sch = simulate_times(inst, plan);
      for (int i = 1; i <= 2 * n; ++i)
        if (sch.node_time[static_cast<std::size_t>(i)]) a[names::time(i)] = sch.node_time[static_cast<std::size_t>(i)]->value();
    } catch (const Error&) {
    }
  }
  return a;
}

namespace detail {

inline std::vector<int> parse_indices(const std::string& name) {
  std::vector<int> idx;
  std::size_t p = name.find('_');
  while (p != std::string::npos) {
    std::size_t q = name.find('_', p + 1);
    idx.push_back(std::stoi(name.substr(p + 1, q == std::string::npos ? std::string::npos : q - p - 1)));
    p = q;
  }
  return idx;
}

inline std::string arcs_str(const std::vector<std::pair<int, int>>& arcs) {
  std::string s;
  for (const auto& [a, b] : arcs) s += (s.empty() ? "" : ",") + arc_str(a, b);
  return s;
}

}  // namespace detail

/// Rebuilds a plan from a 0/1 assignment by following vehicle arcs from the
/// depot and each pollster's ride/walk arcs. Throws on fractional binaries or
/// arcs that do not connect to the depot.
inline Plan parse_solution(const MipModel& m, const Assignment& a, double tol = 1e-6) {
  const int n = m.n, sink = 2 * n + 1;
  using ArcSet = std::map<int, std::vector<int>>;
  std::map<std::pair<int, int>, ArcSet> y_arcs, z_arcs, x_arcs;  // (who, day) -> from -> tos
  std::map<std::pair<int, int>, int> breaks;
  std::vector<bool> active(static_cast<std::size_t>(m.num_days), false);
  std::map<std::pair<int, int>, int> node_vehicle;  // (node, day) -> vehicle leaving it

  for (const Variable& v : m.variables) {
    if (v.kind != VarKind::Binary) continue;
    auto it = a.find(v.name);
    const double val = it == a.end() ? 0.0 : it->second;
    if (std::fabs(val) > tol && std::fabs(val - 1) > tol)
      throw Error("non-integral binary " + v.name + " = " + detail::num(val));
    if (val < 0.5) continue;
    const auto idx = detail::parse_indices(v.name);
    switch (v.name[0]) {
      case 'x': x_arcs[{idx[2], idx[3]}][idx[0]].push_back(idx[1]); break;
      case 'y':
        y_arcs[{idx[2], idx[3]}][idx[0]].push_back(idx[1]);
        node_vehicle[{idx[0], idx[3]}] = idx[2];
        break;
      case 'z': z_arcs[{idx[2], idx[3]}][idx[0]].push_back(idx[1]); break;
      case 'w': breaks[{idx[1], idx[2]}] = idx[0]; break;
      case 'u': active[static_cast<std::size_t>(idx[0])] = true; break;
      default: break;
    }
  }

  Plan plan;
  plan.days.resize(static_cast<std::size_t>(m.num_days));
  for (int s = 0; s < m.num_days; ++s) plan.days[static_cast<std::size_t>(s)].active = active[static_cast<std::size_t>(s)];

  auto take = [](ArcSet& arcs, int from) -> std::optional<int> {
    auto it = arcs.find(from);
    if (it == arcs.end() || it->second.empty()) return std::nullopt;
    if (it->second.size() > 1) throw Error("node " + std::to_string(from) + " has several outgoing arcs");
    int to = it->second.front();
    arcs.erase(it);
    return to;
  };
  auto leftovers = [](const ArcSet& arcs) {
    std::vector<std::pair<int, int>> out;
    for (const auto& [from, tos] : arcs)
      for (int to : tos) out.push_back({from, to});
    return out;
  };

  for (auto& [key, arcs] : y_arcs) {
    const auto [k, s] = key;
    VehicleRoute r{k, 0, {0}};
    int cur = 0;
    try {
      while (cur != sink) {
        auto nxt = take(arcs, cur);
        if (!nxt) break;
        r.nodes.push_back(*nxt);
        cur = *nxt;
        if (r.nodes.size() > static_cast<std::size_t>(2 * n + 2)) break;
      }
    } catch (const Error& e) {
      throw Error("vehicle " + std::to_string(k) + " day " + std::to_string(s) + ": " + e.what());
    }
    auto rest = leftovers(arcs);
    if (!rest.empty() || cur != sink)
      throw Error("vehicle " + std::to_string(k) + " day " + std::to_string(s) +
                  ": arcs disconnected from the depot: " + (rest.empty() ? "route does not return" : detail::arcs_str(rest)));
    plan.days[static_cast<std::size_t>(s)].vehicles.push_back(std::move(r));
  }

  std::set<std::pair<int, int>> pollster_keys;
  for (const auto& [key, _] : z_arcs) pollster_keys.insert(key);
  for (const auto& [key, _] : x_arcs) pollster_keys.insert(key);
  for (const auto& key : pollster_keys) {
    const auto [e, s] = key;
    ArcSet& zs = z_arcs[key];
    ArcSet& xs = x_arcs[key];
    ServiceRoute r;
    r.pollster = e;
    int cur = 0;
    const std::string who = "pollster " + std::to_string(e) + " day " + std::to_string(s);
    try {
      for (int steps = 0; cur != sink && steps <= 4 * n + 4; ++steps) {
        if (auto to = take(xs, cur)) {
          if (r.legs.empty() || r.legs.back().kind != LegKind::Walk) r.legs.push_back(Leg::walk({cur}));
          r.legs.back().nodes.push_back(*to);
          cur = *to;
        } else if (auto tz = take(zs, cur)) {
          auto veh = node_vehicle.find({cur, s});
          const int k = veh == node_vehicle.end() ? -1 : veh->second;
          if (r.legs.empty() || r.legs.back().kind != LegKind::Ride) r.legs.push_back(Leg::ride(k, {cur}));
          r.legs.back().nodes.push_back(*tz);
          cur = *tz;
        } else {
          break;
        }
      }
    } catch (const Error& ex) {
      throw Error(who + ": " + ex.what());
    }
    auto rest = leftovers(zs);
    auto rest_x = leftovers(xs);
    rest.insert(rest.end(), rest_x.begin(), rest_x.end());
    if (!rest.empty() || cur != sink)
      throw Error(who + ": arcs disconnected from the depot: " + (rest.empty() ? "route does not return" : detail::arcs_str(rest)));
    if (auto br = breaks.find(key); br != breaks.end()) r.break_store = br->second;
    plan.days[static_cast<std::size_t>(s)].pollsters.push_back(std::move(r));
  }

  Schedule sch;
  sch.node_time.assign(static_cast<std::size_t>(2 * n + 2), std::nullopt);
  bool any = false;
  for (int i = 1; i <= 2 * n; ++i)
    if (auto it = a.find(names::time(i)); it != a.end()) {
      sch.node_time[static_cast<std::size_t>(i)] = Minutes::from_double(it->second);
      any = true;
    }
  if (any) plan.schedule = sch;
  return plan;
}

}  // namespace ivprp
