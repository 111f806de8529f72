#include "wrsync/detection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "int128.hpp"
#include "wrsync/errors.hpp"
#include "wrsync/rng.hpp"

namespace wrsync {

namespace {

using detail::i128;

Femtoseconds ps_to_fs(double ps) { return static_cast<Femtoseconds>(std::llround(ps * kFemtosecondsPerPicosecond)); }

// fs value of scaled / divisor, exact when divisible.
double scaled_fs_to_ps(i128 scaled, i128 divisor) {
  const i128 whole = scaled / divisor;
  const i128 remainder = scaled % divisor;
  double ps = static_cast<double>(whole) / kFemtosecondsPerPicosecond;
  if (remainder != 0) {
    ps += static_cast<double>(remainder) / static_cast<double>(divisor) / kFemtosecondsPerPicosecond;
  }
  return ps;
}

}  // namespace

double TaggerConfig::per_tag_sigma_ps() const {
  return std::sqrt((irf_rms_ps * irf_rms_ps + per_channel_extra_jitter_ps * per_channel_extra_jitter_ps) / 2.0);
}

void validate(const TaggerConfig& tagger, const std::string& context, std::vector<std::string>& issues) {
  if (!(tagger.irf_rms_ps >= 0.0)) issues.push_back(context + ": irf_rms_ps must be >= 0");
  if (!(tagger.deadtime_ns >= 0.0)) issues.push_back(context + ": deadtime_ns must be >= 0");
  if (!(tagger.per_channel_extra_jitter_ps >= 0.0)) {
    issues.push_back(context + ": per_channel_extra_jitter_ps must be >= 0");
  }
}

void validate(const DividerConfig& divider, const std::string& context, std::vector<std::string>& issues) {
  if (divider.ratio < 1) issues.push_back(context + ": ratio must be >= 1");
  if (!(divider.added_jitter_ps >= 0.0)) issues.push_back(context + ": added_jitter_ps must be >= 0");
}

std::vector<Femtoseconds> apply_deadtime(std::span<const Femtoseconds> events, Femtoseconds deadtime_fs) {
  if (deadtime_fs <= 0) return {events.begin(), events.end()};
  std::vector<Femtoseconds> kept;
  kept.reserve(events.size());
  std::optional<Femtoseconds> rearm;
  for (Femtoseconds t : events) {
    if (rearm && t < *rearm) continue;
    if (rearm && t < *rearm + deadtime_fs) {
      *rearm += deadtime_fs;
    } else {
      rearm = t + deadtime_fs;
    }
    kept.push_back(t);
  }
  return kept;
}

TimeTagSeries emit_tags(const PhaseSeries& pulse_timing, const Frequency& rate, const TaggerConfig& tagger,
                        std::uint64_t seed, std::uint32_t channel) {
  std::vector<std::string> issues;
  validate(tagger, "tagger", issues);
  if (!issues.empty()) throw InvalidArgument(issues.front());
  const double pulses_per_sample = pulse_timing.tau0() * rate.hertz();
  const auto k = static_cast<std::int64_t>(std::llround(pulses_per_sample));
  if (k < 1 || std::abs(pulses_per_sample - static_cast<double>(k)) > 1e-6 * pulses_per_sample) {
    throw InvalidArgument("rate " + rate.to_string() + " Hz is not an integer multiple of 1/tau0");
  }
  const double sigma = tagger.per_tag_sigma_ps();
  GaussianSource gauss(seed);
  TimeTagSeries out;
  out.channel = channel;
  const auto samples = pulse_timing.samples();
  out.timestamps.resize(samples.size() * static_cast<std::size_t>(k));
  std::size_t pulse = 0;
  for (double x : samples) {
    for (std::int64_t j = 0; j < k; ++j, ++pulse) {
      const double jitter = sigma > 0.0 ? sigma * gauss.next() : 0.0;
      out.timestamps[pulse] = rate.index_time_fs(static_cast<std::int64_t>(pulse)) + ps_to_fs(x + jitter);
    }
  }
  if (!out.is_sorted()) std::sort(out.timestamps.begin(), out.timestamps.end());
  const auto deadtime_fs = static_cast<Femtoseconds>(std::llround(tagger.deadtime_ns * 1e6));
  if (deadtime_fs > 0) out.timestamps = apply_deadtime(out.timestamps, deadtime_fs);
  return out;
}

TimeTagSeries divide(const TimeTagSeries& tags, const DividerConfig& divider, std::uint64_t seed) {
  std::vector<std::string> issues;
  validate(divider, "divider", issues);
  if (!issues.empty()) throw InvalidArgument(issues.front());
  TimeTagSeries out;
  out.channel = tags.channel;
  out.timestamps.reserve(tags.timestamps.size() / static_cast<std::size_t>(divider.ratio) + 1);
  GaussianSource gauss(seed);
  for (std::size_t i = 0; i < tags.timestamps.size(); i += static_cast<std::size_t>(divider.ratio)) {
    Femtoseconds t = tags.timestamps[i];
    if (divider.added_jitter_ps > 0.0) t += ps_to_fs(divider.added_jitter_ps * gauss.next());
    out.timestamps.push_back(t);
  }
  if (!out.is_sorted()) std::sort(out.timestamps.begin(), out.timestamps.end());
  return out;
}

PhaseSeries pair_tags(const TimeTagSeries& a, const TimeTagSeries& b, const Frequency& nominal_a,
                      const Frequency& nominal_b) {
  if (!a.is_sorted() || !b.is_sorted()) throw InvalidArgument("unsorted input");
  const bool a_is_slow = nominal_a.hertz() <= nominal_b.hertz();
  const auto& slow = a_is_slow ? a.timestamps : b.timestamps;
  const auto& fast = a_is_slow ? b.timestamps : a.timestamps;
  const Frequency& slow_rate = a_is_slow ? nominal_a : nominal_b;
  const Frequency& fast_rate = a_is_slow ? nominal_b : nominal_a;
  const auto [ratio_num, ratio_den] = fast_rate.ratio_to(slow_rate);
  if (ratio_den != 1) {
    throw InvalidArgument("nominal rates " + nominal_a.to_string() + " and " + nominal_b.to_string() +
                          " share no common subrate");
  }
  if (slow.empty()) throw PairingError("channels unpairable: slow channel is empty");

  // Periods scaled by the rate numerator keep every quantity integral:
  // P_fast * num_fast = 1e15 * den_fast.
  const i128 fast_num = fast_rate.numerator();
  const i128 fast_period_scaled = i128(kFemtosecondsPerSecond) * fast_rate.denominator();
  const long double slow_period_fs = static_cast<long double>(kFemtosecondsPerSecond) *
                                     static_cast<long double>(slow_rate.denominator()) /
                                     static_cast<long double>(slow_rate.numerator());
  const long double match_window_fs = slow_period_fs / 2.0L;

  std::vector<double> out;
  out.reserve(slow.size());
  std::vector<bool> matched;
  matched.reserve(slow.size());
  std::optional<i128> previous;
  std::size_t j = 0;
  std::size_t unmatched = 0;

  for (std::size_t k = 0; k < slow.size(); ++k) {
    const Femtoseconds s = slow[k];
    if (k > 0) {
      // Local spacing, so a steady frequency offset never shifts the count.
      const auto step = std::llround(static_cast<long double>(s - slow[k - 1]) / slow_period_fs);
      if (step < 1) continue;
      for (long long gap = 1; gap < step; ++gap) {
        out.push_back(out.empty() ? 0.0 : out.back());
        matched.push_back(false);
        ++unmatched;
      }
    }

    while (j + 1 < fast.size() && fast[j + 1] <= s) ++j;
    std::optional<Femtoseconds> nearest;
    if (!fast.empty()) {
      nearest = fast[j];
      if (j + 1 < fast.size() && std::llabs(fast[j + 1] - s) < std::llabs(fast[j] - s)) nearest = fast[j + 1];
    }
    if (!nearest || static_cast<long double>(std::llabs(*nearest - s)) > match_window_fs) {
      out.push_back(out.empty() ? 0.0 : out.back());
      matched.push_back(false);
      ++unmatched;
      continue;
    }
    const Femtoseconds d = a_is_slow ? (*nearest - s) : (s - *nearest);
    const i128 scaled = i128(d) * fast_num;
    const i128 reference = previous.value_or(0);
    const i128 wraps = detail::div_round(scaled - reference, fast_period_scaled);
    const i128 reduced = scaled - wraps * fast_period_scaled;
    previous = reduced;
    out.push_back(scaled_fs_to_ps(reduced, fast_num));
    matched.push_back(true);
  }

  const std::size_t total = out.size();
  if (total == 0 || unmatched * 10 > total) {
    throw PairingError("channels unpairable: " + std::to_string(unmatched) + " of " + std::to_string(total) +
                       " slow-channel tags unmatched");
  }
  // Leading unmatched samples take the first matched value.
  const auto first = static_cast<std::size_t>(std::find(matched.begin(), matched.end(), true) - matched.begin());
  for (std::size_t i = 0; i < first; ++i) out[i] = out[first];

  return PhaseSeries(slow_rate.period_s(), std::move(out),
                     "pair:" + std::to_string(a.channel) + ":" + std::to_string(b.channel));
}

}  // namespace wrsync
