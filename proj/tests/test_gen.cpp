#include <gtest/gtest.h>

#include "ivprp/gen.hpp"

using namespace ivprp;

TEST(Generate, DeterministicUnderSeed) {
  GenParams p;
  p.seed = 42;
  EXPECT_EQ(to_json(generate_instance(p)).dump(), to_json(generate_instance(p)).dump());
  GenParams q = p;
  q.seed = 43;
  EXPECT_NE(to_json(generate_instance(p)).dump(), to_json(generate_instance(q)).dump());
}

TEST(Generate, TimeProperties) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    GenParams p;
    p.n = 12;
    p.seed = seed;
    const Instance in = generate_instance(p);
    EXPECT_TRUE(instance_errors(in).empty());
    const double veh_per_min = p.vehicle_kmh * 1000 / 60, walk_per_min = p.walk_kmh * 1000 / 60;
    for (int i = 0; i < p.n; ++i) {
      const auto I = static_cast<std::size_t>(i);
      EXPECT_GE(in.service[I].value(), 1);
      EXPECT_LE(in.service[I].value(), 20);
      const auto& c = *in.coords;
      EXPECT_LE(std::hypot(c[I][0], c[I][1]), p.radius_m + 1e-9);
      for (int j = 0; j < p.n; ++j) {
        const auto J = static_cast<std::size_t>(j);
        if (i == j) continue;
        EXPECT_EQ(in.walk[I][J], in.walk[J][I]);
        const double d = std::hypot(c[I][0] - c[J][0], c[I][1] - c[J][1]);
        const double base = std::max(0.01, d / veh_per_min);
        EXPECT_GE(in.drive_store[I][J].value(), base - 0.006);
        EXPECT_LE(in.drive_store[I][J].value(), base * (1 + p.eta_max) + 0.006);
        EXPECT_NEAR(in.walk[I][J].value(), std::max(0.01, d / walk_per_min), 0.006);
      }
    }
  }
}

TEST(Generate, NoAsymmetryGivesSymmetricDrives) {
  GenParams p;
  p.n = 8;
  p.eta_max = 0;
  const Instance in = generate_instance(p);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(in.drive_out[i], in.drive_in[i]);
    for (std::size_t j = 0; j < 8; ++j) EXPECT_EQ(in.drive_store[i][j], in.drive_store[j][i]);
  }
}

TEST(Generate, SizingStaysInsideTheBox) {
  GenParams p;
  p.n = 10;
  p.b_max = 100;
  p.pause = 10;
  p.capacity = 1;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    p.seed = seed;
    const Instance in = generate_instance(p);
    EXPECT_LE(in.num_vehicles, 3);
    EXPECT_LE(in.num_pollsters, 5);
    EXPECT_LE(in.num_days, 15);
    EXPECT_GE(in.num_vehicles, 1);
  }
}

TEST(Generate, BadParams) {
  GenParams p;
  p.eta_max = 1;
  EXPECT_THROW(generate_instance(p), Error);
  p.eta_max = 0.3;
  p.walk_kmh = 0;
  EXPECT_THROW(generate_instance(p), Error);
  EXPECT_THROW(preset_params(10, 1), Error);
}

TEST(Presets, Rows) {
  const auto suite = preset_suite(7);
  ASSERT_EQ(suite.size(), 10u);
  const Instance& n20 = suite[5];
  EXPECT_EQ(n20.n, 20);
  EXPECT_EQ(n20.b_max, Minutes::whole(150));
  EXPECT_EQ(n20.pause, Minutes::whole(15));
  EXPECT_EQ(n20.capacity, 2);
  EXPECT_EQ(n20.num_days, 1);
  const Instance& n50 = suite[9];
  EXPECT_EQ(n50.num_vehicles, 3);
  EXPECT_EQ(n50.num_pollsters, 5);
  EXPECT_EQ(n50.num_days, 2);
  for (const Instance& in : suite) EXPECT_TRUE(instance_errors(in).empty());
}
