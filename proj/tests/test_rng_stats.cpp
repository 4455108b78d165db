#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "polisim/errors.hpp"
#include "polisim/rng.hpp"
#include "polisim/stats.hpp"

using namespace polisim;

TEST(Rng, SameSeedSameStream) {
  Rng a(99), b(99);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, KnownFirstDraw) {
  // The standard pins the 10000th output of a default-seeded mt19937_64.
  Rng r(5489);
  for (int i = 0; i < 9999; ++i) r.next();
  EXPECT_EQ(r.next(), 9981545732273789042ULL);
}

TEST(Rng, UniformAndIndexInRange) {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    ASSERT_LT(r.index(7), 7u);
  }
  EXPECT_ANY_THROW(r.index(0));
}

TEST(Rng, WeightedSkipsZeroWeights) {
  Rng r(3);
  const std::vector<double> w{0.0, 1.0, 0.0, 3.0};
  std::array<int, 4> hits{};
  for (int i = 0; i < 40000; ++i) ++hits[r.weighted(w)];
  EXPECT_EQ(hits[0], 0);
  EXPECT_EQ(hits[2], 0);
  EXPECT_NEAR(hits[3] / 40000.0, 0.75, 0.02);
  const std::vector<double> zeros{0.0, 0.0};
  EXPECT_ANY_THROW(r.weighted(zeros));
}

TEST(Hashing, StableValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
}

TEST(Percentile, LinearInterpolation) {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  EXPECT_DOUBLE_EQ(percentile(v, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(percentile(v, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(percentile(v, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(percentile(v, 0.25), 1.75);
  const std::vector<double> one{7.0};
  EXPECT_DOUBLE_EQ(percentile(one, 0.95), 7.0);
  const std::vector<double> none;
  EXPECT_THROW(percentile(none, 0.5), ValidationError);
  EXPECT_THROW(percentile(v, 1.5), ValidationError);
}

TEST(Median, OddAndEven) {
  const std::vector<double> odd{-1.0, 0.0, 1.0};
  EXPECT_DOUBLE_EQ(median(odd), 0.0);
  const std::vector<double> even{1.0, 2.0, 3.0, 10.0};
  EXPECT_DOUBLE_EQ(median(even), 2.5);
}

TEST(Bootstrap, ConstantDataIsDegenerate) {
  const std::vector<double> v(30, 0.5);
  auto ci = serial::bootstrap_median_ci(v, {});
  EXPECT_EQ(ci.low, 0.5);
  EXPECT_EQ(ci.high, 0.5);
}

TEST(Bootstrap, ParallelMatchesSerialBitForBit) {
  Rng r(17);
  std::vector<double> v(201);
  for (double& x : v) x = r.uniform() * 2.0 - 1.0;
  for (std::uint64_t seed : {1ULL, 2ULL, 12345ULL}) {
    BootstrapConfig cfg;
    cfg.seed = seed;
    auto a = serial::bootstrap_median_ci(v, cfg);
    auto b = parallel::bootstrap_median_ci(v, cfg);
    EXPECT_EQ(a.low, b.low);
    EXPECT_EQ(a.high, b.high);
    EXPECT_LE(a.low, median(v));
    EXPECT_GE(a.high, median(v));
  }
}

TEST(Bootstrap, SeedControlled) {
  const std::vector<double> v{0.1, 0.5, 0.2, 0.9, -0.3, 0.0, 0.7};
  BootstrapConfig cfg;
  auto a = parallel::bootstrap_median_ci(v, cfg);
  auto b = parallel::bootstrap_median_ci(v, cfg);
  EXPECT_EQ(a.low, b.low);
  EXPECT_EQ(a.high, b.high);
}
