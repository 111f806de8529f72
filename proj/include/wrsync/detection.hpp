#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wrsync/timebase.hpp"

namespace wrsync {

// Time-tagger channel model.
//
// The jitter fields are pair-referred, the way tagger jitter is quoted and
// measured: the RMS of the time difference between two channels fed the same
// edge. Each tag therefore receives Gaussian jitter with standard deviation
// sqrt(irf^2 + extra^2) / sqrt(2), so that a pair of such channels reads
// sqrt(irf^2 + extra^2).
struct TaggerConfig {
  double irf_rms_ps = 1.6;
  double deadtime_ns = 80.0;
  // RF conditioning (inverter, DC block, attenuator) on clock channels.
  double per_channel_extra_jitter_ps = 0.0;

  double per_tag_sigma_ps() const;
};

struct DividerConfig {
  std::int64_t ratio = 8;
  // Applied to every kept tag in full; a divider sits on one channel only.
  double added_jitter_ps = 0.0;
};

void validate(const TaggerConfig& tagger, const std::string& context, std::vector<std::string>& issues);
void validate(const DividerConfig& divider, const std::string& context, std::vector<std::string>& issues);

// Pulse i of the train lands at i/rate + x[floor(i / k)] plus tagger jitter,
// where rate = k / tau0 for an integer k >= 1 (zero-order hold of the timing
// error across the k pulses of a sample interval). Dead time is then applied
// and the result is sorted.
TimeTagSeries emit_tags(const PhaseSeries& pulse_timing, const Frequency& rate, const TaggerConfig& tagger,
                        std::uint64_t seed, std::uint32_t channel = 0);

// Dead-time filter over sorted event times. After an accepted event the
// channel re-arms deadtime later. When an event is accepted before the next
// slot of a busy channel has elapsed, the channel stays on its conversion
// cadence (re-arm at previous re-arm + deadtime) instead of restarting it,
// so a saturated channel accepts exactly one event per deadtime.
std::vector<Femtoseconds> apply_deadtime(std::span<const Femtoseconds> sorted_events, Femtoseconds deadtime_fs);

// Keeps tags 0, ratio, 2 ratio, ... and adds white jitter to each.
TimeTagSeries divide(const TimeTagSeries& tags, const DividerConfig& divider, std::uint64_t seed);

// Phase of channel b relative to channel a (b - a), sampled once per tag of
// the slower channel. Each slow tag is matched to the nearest tag of the
// faster channel; the difference is reduced modulo the fast nominal period and
// unwrapped so that consecutive samples never jump by more than half a period.
// Slow tags with no fast tag within half a slow period, and slow-channel gaps,
// hold the previous value and count as unmatched. Throws PairingError when
// more than 10 % of slow tags are unmatched.
PhaseSeries pair_tags(const TimeTagSeries& a, const TimeTagSeries& b, const Frequency& nominal_a,
                      const Frequency& nominal_b);

}  // namespace wrsync
