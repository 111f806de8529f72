#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrsync/noisegen.hpp"
#include "wrsync/timebase.hpp"

namespace wrsync {

// Type-2 (proportional + integral) second-order loop that locks the laser
// cavity to the 80 MHz reference.
struct PLLConfig {
  // -3 dB point of the closed-loop low-pass response.
  double loop_bandwidth_hz = 1e4;
  double damping = 0.7;
  Frequency reference_rate{10'000'000};
  Frequency output_rate{80'000'000};

  // Natural frequency omega_n (rad/s) whose closed-loop -3 dB point is
  // loop_bandwidth_hz at this damping.
  double natural_frequency() const;
  // output_rate / reference_rate; validate() guarantees it is an integer.
  std::int64_t multiplication() const;
};

struct MLLNode {
  std::string name;
  PLLConfig pll;
  NoiseSpec cavity_noise;  // free-running cavity timing noise
  double sg_jitter_ps = 0.1;  // white PM of the 10 -> 80 MHz signal generator
};

void validate(const PLLConfig& pll, const std::string& context, std::vector<std::string>& issues);
void validate(const MLLNode& node, const std::string& context, std::vector<std::string>& issues);

struct LoopGains {
  double lowpass = 0.0;
  double highpass = 0.0;
};

// |H_lp| and |H_hp| of the continuous-time loop at f_hz, where
// H_lp = (2 z wn s + wn^2) / (s^2 + 2 z wn s + wn^2) and H_hp = 1 - H_lp.
LoopGains loop_response(const PLLConfig& pll, double f_hz);

// Pulse timing error of the laser output sampled at the reference tau0:
// LP(reference + SG white PM) + HP(cavity noise). The loop is discretized
// with the bilinear transform; the x8 multiplier preserves time error.
PhaseSeries discipline(const PhaseSeries& reference, const MLLNode& node, std::uint64_t seed);

// The closed-loop low-pass of pll applied to input at tau0, started locked.
std::vector<double> loop_lowpass(std::span<const double> input, const PLLConfig& pll, double tau0_s);

}  // namespace wrsync
