#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

#include "ivprp/instance.hpp"

namespace ivprp {

using Pairing = std::vector<std::pair<int, int>>;

inline double pairing_weight(const std::vector<std::vector<double>>& w, const Pairing& p) {
  double s = 0;
  for (auto [a, b] : p) s += w[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  return s;
}

namespace detail {

inline void check_square_even(const std::vector<std::vector<double>>& w) {
  if (w.size() % 2 != 0) throw Error("perfect matching needs an even number of vertices, got " + std::to_string(w.size()));
  for (const auto& row : w)
    if (row.size() != w.size()) throw Error("matching weights must form a square matrix");
}

/// Exact minimum by DP over subsets of matched vertices; the lowest
/// unmatched vertex is always paired next, ties keep the earlier partner.
inline Pairing matching_dp(const std::vector<std::vector<double>>& w) {
  const int k = static_cast<int>(w.size());
  const std::uint32_t full = k == 32 ? ~0u : (1u << k) - 1;
  std::vector<double> best(static_cast<std::size_t>(full) + 1, std::numeric_limits<double>::infinity());
  std::vector<std::int8_t> partner(best.size(), -1);
  best[full] = 0;
  // best[m] = cheapest way to match the vertices outside m
  for (std::uint32_t m = full; m-- > 0;) {
    if (std::popcount(m) % 2 != k % 2) continue;
    const int i = std::countr_one(m);
    for (int j = i + 1; j < k; ++j) {
      if (m >> j & 1u) continue;
      const std::uint32_t next = m | 1u << i | 1u << j;
      const double c = w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] + best[next];
      if (c < best[m]) {
        best[m] = c;
        partner[m] = static_cast<std::int8_t>(j);
      }
    }
  }
  Pairing out;
  for (std::uint32_t m = 0; m != full;) {
    const int i = std::countr_one(m);
    const int j = partner[m];
    out.push_back({i, j});
    m |= 1u << i | 1u << j;
  }
  return out;
}

}  // namespace detail

/// Repeatedly pairs the globally cheapest remaining edge (ties: lowest indices).
inline Pairing greedy_matching(const std::vector<std::vector<double>>& w) {
  detail::check_square_even(w);
  const int k = static_cast<int>(w.size());
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  Pairing out;
  for (int round = 0; round < k / 2; ++round) {
    int bi = -1, bj = -1;
    for (int i = 0; i < k; ++i) {
      if (used[static_cast<std::size_t>(i)]) continue;
      for (int j = i + 1; j < k; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        if (bi < 0 || w[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] <
                          w[static_cast<std::size_t>(bi)][static_cast<std::size_t>(bj)]) {
          bi = i;
          bj = j;
        }
      }
    }
    used[static_cast<std::size_t>(bi)] = used[static_cast<std::size_t>(bj)] = true;
    out.push_back({bi, bj});
  }
  return out;
}

/// Pairwise 2-exchange: for two pairs (a,b),(c,d) try (a,c),(b,d) and
/// (a,d),(b,c); apply the first strict improvement until none is left.
inline Pairing two_exchange(const std::vector<std::vector<double>>& w, Pairing p) {
  auto W = [&w](int a, int b) { return w[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t x = 0; x < p.size() && !improved; ++x)
      for (std::size_t y = x + 1; y < p.size() && !improved; ++y) {
        auto [a, b] = p[x];
        auto [c, d] = p[y];
        const double now = W(a, b) + W(c, d);
        if (W(a, c) + W(b, d) < now - 1e-12) {
          p[x] = {std::min(a, c), std::max(a, c)};
          p[y] = {std::min(b, d), std::max(b, d)};
          improved = true;
        } else if (W(a, d) + W(b, c) < now - 1e-12) {
          p[x] = {std::min(a, d), std::max(a, d)};
          p[y] = {std::min(b, c), std::max(b, c)};
          improved = true;
        }
      }
  }
  return p;
}

/// Minimum-weight perfect matching on a complete graph: exact for up to 20
/// vertices, greedy plus 2-exchange beyond. Pairs come out sorted.
inline Pairing min_cost_perfect_matching(const std::vector<std::vector<double>>& w) {
  detail::check_square_even(w);
  Pairing p = w.size() <= 20 ? detail::matching_dp(w) : two_exchange(w, greedy_matching(w));
  for (auto& [a, b] : p)
    if (a > b) std::swap(a, b);
  std::sort(p.begin(), p.end());
  return p;
}

}  // namespace ivprp
