#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "wrsync/errors.hpp"
#include "wrsync/noisegen.hpp"
#include "wrsync/rng.hpp"
#include "wrsync/stability.hpp"

using namespace wrsync;
using testsupport::naive_adev;
using testsupport::naive_mdev;
using testsupport::naive_tdev;

namespace {

PhaseSeries random_series(std::size_t n, std::uint64_t seed, double tau0 = 1e-7) {
  return PhaseSeries(tau0, testsupport::random_walk_plus_white(n, seed));
}

std::vector<double> values(const PhaseSeries& x) { return {x.samples().begin(), x.samples().end()}; }

double rel(double a, double b) { return b == 0.0 ? std::abs(a) : std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Tdev, MatchesDefinitionalOracle) {
  const auto x = random_series(1000, 77);
  const std::vector<std::int64_t> factors{1, 2, 5, 17, 333};
  const auto r = tdev(x, factors);
  ASSERT_EQ(r.points.size(), factors.size());
  for (std::size_t k = 0; k < factors.size(); ++k) {
    EXPECT_LT(rel(r.points[k].value, naive_tdev(values(x), factors[k])), 1e-12) << factors[k];
    EXPECT_EQ(r.points[k].n_used, 1000 - 3 * factors[k] + 1);
    EXPECT_DOUBLE_EQ(r.points[k].tau_s, static_cast<double>(factors[k]) * 1e-7);
  }
}

TEST(Tdev, RandomSeriesOracleProperty) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 9 + rng() % 1992;
    const auto x = random_series(n, rng());
    const auto v = values(x);
    std::vector<std::int64_t> factors{1, 2, 3, 5, 8, static_cast<std::int64_t>(n / 3)};
    std::erase_if(factors, [&](auto m) { return m > static_cast<std::int64_t>(n / 3); });
    const auto r = tdev(x, factors);
    for (const auto& p : r.points) ASSERT_LT(rel(p.value, naive_tdev(v, p.m)), 1e-12) << n << " m=" << p.m;
  }
}

TEST(Tdev, NullCases) {
  const auto c = PhaseSeries(1e-7, std::vector<double>(999, 42.5));
  std::vector<double> ramp(999);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = 3.25 * static_cast<double>(i) - 100.0;
  const auto l = PhaseSeries(1e-7, ramp);
  for (const auto& x : {c, l}) {
    for (const auto& p : tdev(x, default_factors(x.size())).points) EXPECT_LE(p.value, 1e-9) << p.m;
  }
}

TEST(Tdev, FactorsSortedDedupedAndChecked) {
  const auto x = random_series(300, 1);
  const std::vector<std::int64_t> messy{8, 1, 8, 4};
  const auto r = tdev(x, messy);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_EQ(r.points[0].m, 1);
  EXPECT_EQ(r.points[2].m, 8);
  for (std::int64_t bad : {0, 101, -3}) {
    const std::vector<std::int64_t> f{bad};
    try {
      tdev(x, f);
      FAIL() << bad;
    } catch (const InvalidArgument& e) {
      EXPECT_NE(std::string(e.what()).find(std::to_string(bad)), std::string::npos) << e.what();
    }
  }
}

TEST(Tdev, DefaultFactorLadder) {
  EXPECT_EQ(default_factors(100), (std::vector<std::int64_t>{1, 2, 4, 8, 16, 32}));
  EXPECT_EQ(default_factors(3), (std::vector<std::int64_t>{1}));
}

TEST(Tdev, ScaleReversalAndRampInvariance) {
  const auto x = random_series(1500, 5);
  const auto v = values(x);
  const auto base = tdev(x, default_factors(v.size()));
  std::vector<double> scaled(v.size()), reversed(v.rbegin(), v.rend()), ramped(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    scaled[i] = -2.5 * v[i];
    ramped[i] = v[i] + 1234.5 * static_cast<double>(i);
  }
  const auto s = tdev(PhaseSeries(1e-7, scaled), default_factors(v.size()));
  const auto r = tdev(PhaseSeries(1e-7, reversed), default_factors(v.size()));
  const auto p = tdev(PhaseSeries(1e-7, ramped), default_factors(v.size()));
  for (std::size_t k = 0; k < base.points.size(); ++k) {
    EXPECT_LT(rel(s.points[k].value, 2.5 * base.points[k].value), 1e-12);
    EXPECT_LT(rel(r.points[k].value, base.points[k].value), 1e-12);
    EXPECT_LT(rel(p.points[k].value, base.points[k].value), 1e-9);
  }
}

TEST(AdevMdev, MatchOracles) {
  const auto x = random_series(900, 9, 1e-3);
  const auto v = values(x);
  const std::vector<std::int64_t> factors{1, 3, 10, 300};
  const auto both = adev_mdev(x, factors);
  const auto t = tdev(x, factors);
  for (std::size_t k = 0; k < factors.size(); ++k) {
    const double tau = static_cast<double>(factors[k]) * 1e-3;
    EXPECT_LT(rel(both.mdev.points[k].value, naive_mdev(v, factors[k], 1e-3)), 1e-12);
    EXPECT_LT(rel(both.adev.points[k].value, naive_adev(v, factors[k], 1e-3)), 1e-12);
    // TDEV = tau MDEV / sqrt(3), with TDEV in ps.
    EXPECT_LT(rel(t.points[k].value, tau * both.mdev.points[k].value / std::sqrt(3.0) * 1e12), 1e-12);
  }
  EXPECT_EQ(both.mdev.points[0].value, both.adev.points[0].value);
  EXPECT_EQ(adev(x, factors).points[2].value, both.adev.points[2].value);
  EXPECT_EQ(mdev(x, factors).points[2].value, both.mdev.points[2].value);
}

TEST(AdevMdev, WhiteFmSlope) {
  double mean_slope = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto x = gen_power_law({-2, 1.0}, 100'000, 1e-3, 600 + seed);
    const std::vector<std::int64_t> f{10, 100};
    const auto r = adev(x, f);
    mean_slope += std::log10(r.points[1].value / r.points[0].value) / 5.0;
  }
  EXPECT_NEAR(mean_slope, -0.5, 0.05);
}

TEST(NoiseId, WhitePmAndRandomWalkFm) {
  int white_hits = 0, rw_hits = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    if (noise_id(gen_power_law({0, 1.0}, 4096, 1e-7, mix_seed(1, seed)), 1) == 0) ++white_hits;
    if (noise_id(gen_power_law({-4, 1.0}, 4096, 1e-7, mix_seed(2, seed)), 1) == -4) ++rw_hits;
  }
  EXPECT_GE(white_hits, 190);
  EXPECT_GE(rw_hits, 180);
}

TEST(NoiseId, IntermediateClasses) {
  EXPECT_EQ(noise_id(gen_power_law({-2, 1.0}, 8192, 1e-7, 4), 1), -2);
  EXPECT_EQ(noise_id(gen_power_law({-2, 1.0}, 8192, 1e-7, 4), 4), -2);
}

TEST(NoiseId, Errors) {
  try {
    noise_id(PhaseSeries(1e-7, std::vector<double>(1000, 3.0)), 1);
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_STREQ(e.what(), "degenerate series");
  }
  EXPECT_THROW(noise_id(random_series(100, 3), 4), InvalidArgument);
}

// Reference values from an independent implementation of the same
// approximation (allantools edf_greenhall, d = 2, overlapping, modified).
TEST(Edf, MatchesReferenceTable) {
  struct Case {
    int alpha;
    std::int64_t m;
    std::size_t n;
    double edf;
  };
  const Case cases[] = {
      {2, 1, 4096, 2105.7502373108496},   {2, 4, 4096, 1201.224339215747},    {2, 16, 4096, 324.29293999568813},
      {2, 64, 1000, 17.12304941860465},   {2, 300, 1000, 1.4739862814595495}, {2, 100, 100000, 1282.697063890677},
      {1, 1, 4096, 2603.482146170537},    {1, 4, 4096, 1019.6727359598418},   {1, 16, 4096, 254.51338715970465},
      {1, 64, 1000, 13.330220889292695},  {1, 300, 1000, 1.172193679734108},  {1, 100, 100000, 1000.630127067166},
      {0, 1, 4096, 3204.2041717999914},   {0, 4, 4096, 988.5355453217691},    {0, 16, 4096, 245.46822223436624},
      {0, 64, 1000, 12.833379504774433},  {0, 300, 1000, 1.1047571556965818}, {0, 100, 100000, 965.7289016747847},
      {-1, 1, 4096, 3668.2265497428925},  {-1, 4, 4096, 975.4061306758608},   {-1, 16, 4096, 242.0539186077378},
      {-1, 64, 1000, 12.568291298779828}, {-1, 300, 1000, 1.0674059880745872}, {-1, 100, 100000, 951.8318726427045},
      {-2, 1, 4096, 3123.3797748948205},  {-2, 4, 4096, 784.5391982241119},   {-2, 16, 4096, 194.64552850285588},
      {-2, 64, 1000, 10.03482130415925},  {-2, 300, 1000, 1.0340815578497071}, {-2, 100, 100000, 766.0684145300851},
  };
  for (const auto& c : cases) {
    EXPECT_NEAR(edf_modified(c.alpha, c.m, c.n), c.edf, 1e-9 * c.edf) << c.alpha << " " << c.m << " " << c.n;
  }
}

TEST(Confidence, BoundsBracketEstimate) {
  const auto x = gen_power_law({0, 1.0}, 4096, 1e-7, 8);
  const auto r = confidence(tdev(x, default_factors(x.size())), x);
  for (const auto& p : r.points) {
    EXPECT_LE(p.ci_low, p.value);
    EXPECT_GE(p.ci_high, p.value);
    EXPECT_GE(p.ci_low, 0.0);
    EXPECT_GT(p.edf, 0.0);
  }
  EXPECT_EQ(r.points.front().noise_alpha, 0);
  EXPECT_THROW(confidence(adev(x, default_factors(x.size())), x), InvalidArgument);
}

TEST(Confidence, NarrowsWithLength) {
  double previous = std::numeric_limits<double>::infinity();
  for (std::size_t n : {1024u, 4096u, 16384u, 65536u}) {
    const auto x = gen_power_law({0, 1.0}, n, 1e-7, 8);
    const std::vector<std::int64_t> f{4};
    const auto p = confidence(tdev(x, f), x).points.front();
    const double width = (p.ci_high - p.ci_low) / p.value;
    EXPECT_LT(width, previous) << n;
    previous = width;
  }
}

TEST(Confidence, WidestNearLargestFactor) {
  const auto x = gen_power_law({0, 1.0}, 3000, 1e-7, 8);
  const std::vector<std::int64_t> f{1, 10, 100, 500, 990};
  const auto r = confidence(tdev(x, f), x);
  double widest = 0.0;
  std::int64_t widest_m = 0;
  for (const auto& p : r.points) {
    if (!p.reliable) continue;
    const double w = (p.ci_high - p.ci_low) / p.value;
    if (w > widest) {
      widest = w;
      widest_m = p.m;
    }
  }
  EXPECT_EQ(widest_m, 990);
}

TEST(Confidence, FewTermsMarkedUnreliable) {
  const auto x = gen_power_law({0, 1.0}, 20, 1e-7, 8);
  // 18, 9 and 3 squared terms.
  const std::vector<std::int64_t> f{1, 4, 6};
  const auto r = confidence(tdev(x, f), x);
  EXPECT_TRUE(r.points[0].reliable);
  EXPECT_TRUE(r.points[1].reliable);
  EXPECT_FALSE(r.points[2].reliable);
  EXPECT_EQ(r.points[2].ci_low, 0.0);
  EXPECT_TRUE(std::isinf(r.points[2].ci_high));
}

TEST(AdjacentJitter, WhiteSigmaRecovered) {
  const auto x = gen_power_law({0, 2.3}, 1'000'000, 1e-7, 3);
  const auto j = adjacent_jitter(x);
  EXPECT_NEAR(j.first_difference_ps, 2.3, 0.02 * 2.3);
  // The white-PM second difference has variance 6 sigma^2, so TDEV(tau0) = sigma.
  EXPECT_NEAR(j.tdev_tau0_ps, 2.3, 0.02 * 2.3);
}

TEST(AdjacentJitter, ConstantIsZero) {
  const auto j = adjacent_jitter(PhaseSeries(1e-7, std::vector<double>(100, 7.0)));
  EXPECT_EQ(j.first_difference_ps, 0.0);
  EXPECT_EQ(j.tdev_tau0_ps, 0.0);
}
