#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ivprp/instance.hpp"

namespace ivprp {

/// Balanced k-way split of the stores. Subsets hold 1-based store ids in
/// increasing order; the load band [w_lo, w_hi] is a soft target.
struct Partition {
  int k = 0;
  std::vector<std::vector<int>> subsets;
  std::vector<double> loads;  // service minutes per subset
  double intra_cost = 0;      // walking cost inside subsets
  double penalty = 0;         // lambda-weighted band excess
  double objective = 0;
  double mu = 0, sigma = 0, w_lo = 0, w_hi = 0, lambda = 0;
  std::vector<double> history;  // objective after each iteration
};

namespace detail {

/// Symmetrised walking cost between stores a and b (0-based).
inline double edge_cost(const Instance& inst, int a, int b) {
  const auto A = static_cast<std::size_t>(a), B = static_cast<std::size_t>(b);
  return (inst.walk[A][B].value() + inst.walk[B][A].value()) / 2;
}

class Partitioner {
 public:
  Partitioner(const Instance& inst, int k) : inst_(inst), n_(inst.n), k_(k) {
    cost_.assign(static_cast<std::size_t>(n_), std::vector<double>(static_cast<std::size_t>(n_), 0));
    double total = 0;
    int edges = 0;
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b) {
        const double c = edge_cost(inst, a, b);
        cost_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = cost_[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)] = c;
        total += c;
        ++edges;
      }
    t_.resize(static_cast<std::size_t>(n_));
    double sum = 0;
    for (int i = 0; i < n_; ++i) sum += t_[static_cast<std::size_t>(i)] = inst.service[static_cast<std::size_t>(i)].value();
    mu_ = sum / n_;
    double ss = 0;
    for (double t : t_) ss += (t - mu_) * (t - mu_);
    sigma_ = n_ > 1 ? std::sqrt(ss / (n_ - 1)) : 0;
    w_lo_ = mu_ * n_ / k_ - sigma_;
    w_hi_ = mu_ * n_ / k_ + sigma_;
    lambda_ = edges > 0 ? 10 * total / edges : 0;
  }

  Partition run(int iterations, std::uint64_t seed) {
    init();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> store(0, n_ - 1);
    Partition out;
    out.history.reserve(static_cast<std::size_t>(iterations));
    double obj = objective();
    for (int it = 0; it < iterations; ++it) {
      if (k_ > 1) {
        if (rng() % 2 == 0) {
          const int s = store(rng);
          const int from = of_[static_cast<std::size_t>(s)];
          const int to = static_cast<int>((static_cast<std::uint64_t>(from) + 1 + rng() % static_cast<std::uint64_t>(k_ - 1)) % static_cast<std::uint64_t>(k_));
          if (size_[static_cast<std::size_t>(from)] > 1) {
            const double d = move_delta(s, to);
            if (d < -1e-9) {
              apply_move(s, to);
              obj += d;
            }
          }
        } else {
          const int a = store(rng), b = store(rng);
          if (of_[static_cast<std::size_t>(a)] != of_[static_cast<std::size_t>(b)]) {
            const double d = swap_delta(a, b);
            if (d < -1e-9) {
              const int ga = of_[static_cast<std::size_t>(a)], gb = of_[static_cast<std::size_t>(b)];
              apply_move(a, gb);
              apply_move(b, ga);
              obj += d;
            }
          }
        }
      }
      out.history.push_back(obj);
    }
    out.k = k_;
    out.subsets.assign(static_cast<std::size_t>(k_), {});
    for (int i = 0; i < n_; ++i) out.subsets[static_cast<std::size_t>(of_[static_cast<std::size_t>(i)])].push_back(i + 1);
    out.loads = load_;
    out.intra_cost = intra();
    out.penalty = penalty_total();
    out.objective = out.intra_cost + out.penalty;
    out.mu = mu_;
    out.sigma = sigma_;
    out.w_lo = w_lo_;
    out.w_hi = w_hi_;
    out.lambda = lambda_;
    return out;
  }

 private:
  // Longest-processing-time start: heaviest store into the lightest subset.
  void init() {
    of_.assign(static_cast<std::size_t>(n_), 0);
    load_.assign(static_cast<std::size_t>(k_), 0);
    size_.assign(static_cast<std::size_t>(k_), 0);
    std::vector<int> order(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(), [this](int a, int b) { return t_[static_cast<std::size_t>(a)] > t_[static_cast<std::size_t>(b)]; });
    for (std::size_t r = 0; r < order.size(); ++r) {
      int g = 0;
      if (static_cast<int>(r) < k_) {
        g = static_cast<int>(r);
      } else {
        for (int h = 1; h < k_; ++h)
          if (load_[static_cast<std::size_t>(h)] < load_[static_cast<std::size_t>(g)]) g = h;
      }
      const int s = order[r];
      of_[static_cast<std::size_t>(s)] = g;
      load_[static_cast<std::size_t>(g)] += t_[static_cast<std::size_t>(s)];
      ++size_[static_cast<std::size_t>(g)];
    }
  }

  double pen(double load) const { return lambda_ * std::max({0.0, w_lo_ - load, load - w_hi_}); }

  double link(int s, int g, int skip = -1) const {
    double c = 0;
    for (int j = 0; j < n_; ++j)
      if (j != s && j != skip && of_[static_cast<std::size_t>(j)] == g) c += cost_[static_cast<std::size_t>(s)][static_cast<std::size_t>(j)];
    return c;
  }

  double move_delta(int s, int to) const {
    const int from = of_[static_cast<std::size_t>(s)];
    const double t = t_[static_cast<std::size_t>(s)];
    const double lf = load_[static_cast<std::size_t>(from)], lt = load_[static_cast<std::size_t>(to)];
    return link(s, to) - link(s, from) + pen(lf - t) - pen(lf) + pen(lt + t) - pen(lt);
  }

  double swap_delta(int a, int b) const {
    const int ga = of_[static_cast<std::size_t>(a)], gb = of_[static_cast<std::size_t>(b)];
    const double ta = t_[static_cast<std::size_t>(a)], tb = t_[static_cast<std::size_t>(b)];
    const double la = load_[static_cast<std::size_t>(ga)], lb = load_[static_cast<std::size_t>(gb)];
    const double edges = link(a, gb, b) - link(a, ga) + link(b, ga, a) - link(b, gb);
    return edges + pen(la - ta + tb) - pen(la) + pen(lb - tb + ta) - pen(lb);
  }

  void apply_move(int s, int to) {
    const int from = of_[static_cast<std::size_t>(s)];
    load_[static_cast<std::size_t>(from)] -= t_[static_cast<std::size_t>(s)];
    load_[static_cast<std::size_t>(to)] += t_[static_cast<std::size_t>(s)];
    --size_[static_cast<std::size_t>(from)];
    ++size_[static_cast<std::size_t>(to)];
    of_[static_cast<std::size_t>(s)] = to;
  }

  double intra() const {
    double c = 0;
    for (int a = 0; a < n_; ++a)
      for (int b = a + 1; b < n_; ++b)
        if (of_[static_cast<std::size_t>(a)] == of_[static_cast<std::size_t>(b)]) c += cost_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
    return c;
  }

  double penalty_total() const {
    double p = 0;
    for (double l : load_) p += pen(l);
    return p;
  }

  double objective() const { return intra() + penalty_total(); }

  const Instance& inst_;
  int n_, k_;
  std::vector<std::vector<double>> cost_;
  std::vector<double> t_;
  double mu_ = 0, sigma_ = 0, w_lo_ = 0, w_hi_ = 0, lambda_ = 0;
  std::vector<int> of_;
  std::vector<double> load_;
  std::vector<int> size_;
};

}  // namespace detail

/// Intra-subset walking cost plus lambda times the band excess of every
/// subset load, for an arbitrary assignment of stores to subsets.
inline double partition_objective(const Instance& inst, const std::vector<std::vector<int>>& subsets) {
  const int k = static_cast<int>(subsets.size());
  detail::Partitioner p(inst, k);
  Partition stats = p.run(0, 0);
  double obj = 0;
  for (const auto& g : subsets) {
    double load = 0;
    for (std::size_t a = 0; a < g.size(); ++a) {
      load += inst.service[static_cast<std::size_t>(g[a] - 1)].value();
      for (std::size_t b = a + 1; b < g.size(); ++b) obj += detail::edge_cost(inst, g[a] - 1, g[b] - 1);
    }
    obj += stats.lambda * std::max({0.0, stats.w_lo - load, load - stats.w_hi});
  }
  return obj;
}

/// Local search over single-store moves and two-store swaps, accepting strict
/// improvements; exactly `iterations` proposals are drawn.
inline Partition partition_stores(const Instance& inst, int k, int iterations, std::uint64_t seed) {
  if (k < 1 || k > inst.n) throw Error("partition needs 1 <= k <= n, got k=" + std::to_string(k) + " n=" + std::to_string(inst.n));
  if (iterations < 0) throw Error("iteration count must be >= 0");
  return detail::Partitioner(inst, k).run(iterations, seed);
}

}  // namespace ivprp
