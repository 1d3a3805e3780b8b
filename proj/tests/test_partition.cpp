#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fixtures.hpp"
#include "ivprp/gen.hpp"
#include "ivprp/partition.hpp"

using namespace ivprp;

namespace {

void expect_cover(const Partition& p, int n) {
  std::vector<int> seen(static_cast<std::size_t>(n + 1), 0);
  for (const auto& g : p.subsets) {
    EXPECT_FALSE(g.empty());
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    for (int s : g) ++seen[static_cast<std::size_t>(s)];
  }
  for (int i = 1; i <= n; ++i) EXPECT_EQ(seen[static_cast<std::size_t>(i)], 1) << "store " << i;
}

}  // namespace

TEST(Partition, ReferenceStoresMatchExhaustiveSearch) {
  const Instance in = fixtures::four_stores();
  const Partition p = partition_stores(in, 2, 200, 1);
  expect_cover(p, 4);
  // every assignment of stores 2..4 to a side, store 1 fixed on side 0
  double best = 1e300;
  for (int mask = 0; mask < 7; ++mask) {
    std::vector<std::vector<int>> g(2);
    g[0].push_back(1);
    for (int s = 2; s <= 4; ++s) g[static_cast<std::size_t>(mask >> (s - 2) & 1)].push_back(s);
    if (g[1].empty()) continue;
    best = std::min(best, partition_objective(in, g));
  }
  EXPECT_DOUBLE_EQ(p.objective, best);
  EXPECT_EQ(p.subsets, (std::vector<std::vector<int>>{{1, 2}, {3, 4}}));
  EXPECT_DOUBLE_EQ(p.intra_cost, 2 + 15);
  EXPECT_DOUBLE_EQ(p.sigma, 8);
  EXPECT_DOUBLE_EQ(p.w_lo, 2);
  EXPECT_DOUBLE_EQ(p.w_hi, 18);
}

TEST(Partition, SingletonsWhenKEqualsN) {
  const Instance in = fixtures::four_stores();
  const Partition p = partition_stores(in, 4, 100, 3);
  expect_cover(p, 4);
  for (const auto& g : p.subsets) EXPECT_EQ(g.size(), 1u);
  EXPECT_DOUBLE_EQ(p.intra_cost, 0);
}

TEST(Partition, ObjectiveNeverIncreases) {
  GenParams gp;
  gp.n = 60;
  gp.seed = 4;
  gp.resources = std::array<int, 3>{3, 5, 15};
  const Instance in = generate_instance(gp);
  const Partition p = partition_stores(in, 6, 3000, 8);
  ASSERT_EQ(p.history.size(), 3000u);
  for (std::size_t i = 1; i < p.history.size(); ++i) EXPECT_LE(p.history[i], p.history[i - 1]);
  EXPECT_NEAR(p.history.back(), p.objective, 1e-6);
  expect_cover(p, 60);
}

TEST(Partition, DeterministicUnderSeed) {
  GenParams gp;
  gp.n = 30;
  gp.resources = std::array<int, 3>{3, 5, 15};
  const Instance in = generate_instance(gp);
  const Partition a = partition_stores(in, 4, 500, 7), b = partition_stores(in, 4, 500, 7);
  EXPECT_EQ(a.subsets, b.subsets);
  EXPECT_EQ(a.history, b.history);
}

TEST(Partition, ObjectiveMatchesRecomputation) {
  GenParams gp;
  gp.n = 25;
  gp.resources = std::array<int, 3>{3, 5, 15};
  const Instance in = generate_instance(gp);
  const Partition p = partition_stores(in, 4, 800, 2);
  EXPECT_NEAR(partition_objective(in, p.subsets), p.objective, 1e-6);
}

TEST(Partition, RejectsKAboveN) {
  EXPECT_THROW(partition_stores(fixtures::four_stores(), 6, 10, 1), Error);
}
