#include <gtest/gtest.h>

#include <cmath>

#include "support.hpp"
#include "wrsync/detection.hpp"
#include "wrsync/errors.hpp"

using namespace wrsync;

namespace {

const TaggerConfig kIdeal{0.0, 0.0, 0.0};

TimeTagSeries ideal_train(const Frequency& rate, std::size_t count, Femtoseconds offset = 0) {
  TimeTagSeries t;
  for (std::size_t i = 0; i < count; ++i) t.timestamps.push_back(rate.index_time_fs(static_cast<std::int64_t>(i)) + offset);
  return t;
}

}  // namespace

TEST(DeadTime, EightyMegahertzSaturatesAtTwelvePointFive) {
  // 10 ms of an 80 MHz train.
  TaggerConfig tagger{0.0, 80.0, 0.0};
  const auto tags = emit_tags(PhaseSeries::zeros(1e-7, 100'000), Frequency(80'000'000), tagger, 1);
  EXPECT_NEAR(static_cast<double>(tags.timestamps.size()), 125'000.0, 1.0);
  for (std::size_t i = 1; i < tags.timestamps.size(); ++i) {
    ASSERT_GE(tags.timestamps[i] - tags.timestamps[i - 1], 75'000'000);
  }
}

TEST(DeadTime, TenMegahertzLosesNothing) {
  TaggerConfig tagger{1.6, 80.0, 0.0};
  const auto tags = emit_tags(PhaseSeries::zeros(1e-7, 50'000), Frequency(10'000'000), tagger, 2);
  EXPECT_EQ(tags.timestamps.size(), 50'000u);
}

TEST(DeadTime, LongerDeadTimeNeverKeepsMore) {
  const auto train = ideal_train(Frequency(80'000'000), 20'000);
  std::size_t previous = train.timestamps.size();
  for (double ns = 0.0; ns <= 400.0; ns += 5.0) {
    const auto kept = apply_deadtime(train.timestamps, static_cast<Femtoseconds>(ns * 1e6)).size();
    ASSERT_LE(kept, previous) << ns;
    previous = kept;
  }
}

TEST(DeadTime, SaturatedChannelKeepsOnePerDeadTime) {
  const auto train = ideal_train(Frequency(1'000'000'000), 100'000);
  const auto kept = apply_deadtime(train.timestamps, 7'300'000);  // 7.3 ns
  const double expected = 100e-6 / 7.3e-9;
  EXPECT_NEAR(static_cast<double>(kept.size()), expected, 1.0);
}

TEST(EmitTags, ZeroJitterReproducesTiming) {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.001 * static_cast<double>((i * 37) % 5000) - 2.0;
  const Frequency rate(10'000'000);
  const auto tags = emit_tags(PhaseSeries(1e-7, x), rate, kIdeal, 1);
  ASSERT_EQ(tags.timestamps.size(), x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    ASSERT_EQ(tags.timestamps[i], rate.index_time_fs(static_cast<std::int64_t>(i)) + std::llround(x[i] * 1000.0));
  }
}

TEST(EmitTags, RateMustMatchTau0) {
  EXPECT_THROW(emit_tags(PhaseSeries::zeros(1e-7, 10), Frequency(15'000'000), kIdeal, 1), InvalidArgument);
}

TEST(Divide, RatioOneIsIdentity) {
  const auto train = ideal_train(Frequency(80'000'000), 1000, 17);
  const auto out = divide(train, {1, 0.0}, 3);
  EXPECT_EQ(out.timestamps, train.timestamps);
}

TEST(Divide, EightyToTen) {
  const auto train = ideal_train(Frequency(80'000'000), 8000);
  const auto out = divide(train, {8, 0.0}, 3);
  ASSERT_EQ(out.timestamps.size(), 1000u);
  for (std::size_t i = 1; i < out.timestamps.size(); ++i) {
    ASSERT_EQ(out.timestamps[i] - out.timestamps[i - 1], 100'000'000);
  }
}

TEST(PairTags, IdenticalStreamsGiveZero) {
  const auto a = ideal_train(Frequency(10'000'000), 1000);
  const auto x = pair_tags(a, a, Frequency(10'000'000), Frequency(10'000'000));
  for (double v : x.samples()) ASSERT_EQ(v, 0.0);
}

TEST(PairTags, ConstantDelay) {
  const auto a = ideal_train(Frequency(10'000'000), 1000);
  const auto b = ideal_train(Frequency(10'000'000), 1000, 30'000);
  const auto ab = pair_tags(a, b, Frequency(10'000'000), Frequency(10'000'000));
  const auto ba = pair_tags(b, a, Frequency(10'000'000), Frequency(10'000'000));
  for (double v : ab.samples()) ASSERT_EQ(v, 30.0);
  for (double v : ba.samples()) ASSERT_EQ(v, -30.0);
}

TEST(PairTags, MixedRatesUseFastPeriod) {
  const auto a = ideal_train(Frequency(10'000'000), 1000);
  const auto b = ideal_train(Frequency(80'000'000), 8000, 12'500'000 * 3 + 30'000);
  const auto x = pair_tags(a, b, Frequency(10'000'000), Frequency(80'000'000));
  ASSERT_EQ(x.size(), 1000u);
  EXPECT_DOUBLE_EQ(x.tau0(), 1e-7);
  for (double v : x.samples()) ASSERT_EQ(v, 30.0);
}

TEST(PairTags, RampAcrossPeriodIsUnwrapped) {
  // B slips by 0.5 ns per sample, 250 ns in total: more than two periods.
  const Frequency rate(10'000'000);
  const auto a = ideal_train(rate, 500);
  TimeTagSeries b;
  for (std::int64_t i = 0; i < 500; ++i) b.timestamps.push_back(rate.index_time_fs(i) + 20'000'000 + i * 500'000);
  const auto x = pair_tags(a, b, rate, rate);
  double max_step = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) max_step = std::max(max_step, std::abs(x[i] - x[i - 1]));
  EXPECT_LT(max_step, 1000.0);
  // Past each half-period crossing the nearest B tag is the neighbouring
  // pulse, one 0.5 ns ramp step behind; three crossings in 250 ns.
  EXPECT_NEAR(x[x.size() - 1] - x[0], 499 * 500.0, 3 * 500.0 + 1e-6);
}

TEST(PairTags, AntisymmetricOnCleanData) {
  const Frequency rate(10'000'000);
  TaggerConfig tagger{1.7, 0.0, 0.0};
  const auto a = emit_tags(PhaseSeries::zeros(1e-7, 5000), rate, tagger, 1);
  const auto b = emit_tags(PhaseSeries::zeros(1e-7, 5000), rate, tagger, 2);
  const auto ab = pair_tags(a, b, rate, rate);
  const auto ba = pair_tags(b, a, rate, rate);
  for (std::size_t i = 0; i < ab.size(); ++i) ASSERT_EQ(ab[i], -ba[i]);
}

TEST(PairTags, TooManyUnmatched) {
  const Frequency rate(10'000'000);
  const auto a = ideal_train(rate, 1000);
  TimeTagSeries b;
  for (std::size_t i = 0; i < a.timestamps.size(); ++i) {
    if (i % 5 != 0) b.timestamps.push_back(a.timestamps[i]);
  }
  try {
    pair_tags(b, a, rate, rate);
    FAIL();
  } catch (const PairingError& e) {
    EXPECT_NE(std::string(e.what()).find("channels unpairable"), std::string::npos);
  }
  // A few gaps are tolerated and hold the previous value.
  TimeTagSeries sparse;
  for (std::size_t i = 0; i < a.timestamps.size(); ++i) {
    if (i % 20 != 7) sparse.timestamps.push_back(a.timestamps[i] + 1000);
  }
  const auto x = pair_tags(sparse, a, rate, rate);
  EXPECT_EQ(x.size(), 1000u);
  for (double v : x.samples()) ASSERT_EQ(v, -1.0);
}

TEST(PairTags, JitterAddsInQuadrature) {
  const Frequency rate(10'000'000);
  const TaggerConfig ta{1.7, 0.0, 0.0};
  const TaggerConfig tb{0.0, 0.0, 1.55};
  const auto a = emit_tags(PhaseSeries::zeros(1e-7, 1'000'000), rate, ta, 31);
  const auto b = emit_tags(PhaseSeries::zeros(1e-7, 1'000'000), rate, tb, 32);
  const auto x = pair_tags(a, b, rate, rate);
  std::vector<double> d(x.size() - 1);
  for (std::size_t i = 1; i < x.size(); ++i) d[i - 1] = x[i] - x[i - 1];
  const double expected = std::hypot(1.7, 1.55);
  EXPECT_NEAR(testsupport::sample_std(d), expected, 0.02 * expected);
}

TEST(Tagger, ValidationListsIssues) {
  std::vector<std::string> issues;
  validate(TaggerConfig{-1.0, -1.0, -1.0}, "tagger", issues);
  validate(DividerConfig{0, -1.0}, "divider", issues);
  EXPECT_EQ(issues.size(), 5u);
}
