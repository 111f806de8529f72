#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wrsync/timebase.hpp"

namespace wrsync {

// Power-law phase noise with PSD S_x(f) ~ f^alpha. alpha = 0 is white PM,
// -2 white FM, -4 random-walk FM.
struct PowerLawTerm {
  int alpha = 0;
  // alpha = 0: per-sample standard deviation. Otherwise the sample standard
  // deviation of the generated series over the requested length.
  double rms_at_tau0_ps = 0.0;
};

// Band-limited Gaussian noise centred on center_frequency_hz. The band spans
// center * (1 +/- relative_bandwidth / 2) with a Hann-shaped amplitude profile.
struct BumpTerm {
  double center_frequency_hz = 300.0;
  double relative_bandwidth = 1.0;
  double rms_ps = 0.0;
};

// Slow delay drift: a sinusoid plus a random walk in phase.
struct DriftTerm {
  double peak_to_peak_ps = 0.0;
  double period_s = 0.0;
  double random_walk_rms_per_sqrt_s = 0.0;

  bool is_zero() const { return peak_to_peak_ps == 0.0 && random_walk_rms_per_sqrt_s == 0.0; }
};

struct NoiseSpec {
  std::vector<PowerLawTerm> power_law_terms;
  std::vector<BumpTerm> bump_terms;
  std::vector<DriftTerm> drift_terms;

  bool empty() const { return power_law_terms.empty() && bump_terms.empty() && drift_terms.empty(); }
  std::size_t term_count() const { return power_law_terms.size() + bump_terms.size() + drift_terms.size(); }
};

// Appends one message per violated invariant, each prefixed with context.
void validate(const PowerLawTerm& term, const std::string& context, std::vector<std::string>& issues);
void validate(const BumpTerm& term, const std::string& context, std::vector<std::string>& issues);
void validate(const DriftTerm& term, const std::string& context, std::vector<std::string>& issues);
void validate(const NoiseSpec& spec, const std::string& context, std::vector<std::string>& issues);

PhaseSeries gen_power_law(const PowerLawTerm& term, std::size_t n, double tau0_s, std::uint64_t seed);
PhaseSeries gen_bump(const BumpTerm& term, std::size_t n, double tau0_s, std::uint64_t seed);
PhaseSeries gen_drift(const DriftTerm& term, std::size_t n, double tau0_s, std::uint64_t seed);

// Sum of every term of spec. Term k (power-law terms first, then bumps, then
// drifts) is generated with seed mix_seed(seed, k). Bump amplitudes are
// multiplied by bump_scale. An empty spec yields exact zeros.
PhaseSeries generate(const NoiseSpec& spec, std::size_t n, double tau0_s, std::uint64_t seed,
                     double bump_scale = 1.0);

// WR phase-noise amplitude versus received-power margin above the lock
// threshold: 0.3 ps for margins of 20 dB or more, 1.0 ps at 0 dB, linear in dB
// between. Throws InvalidArgument for a negative margin.
double attenuation_jitter(double received_power_margin_db);

// attenuation_jitter(margin) relative to its healthy-link plateau; the factor
// applied to a node's bump terms.
double attenuation_bump_scale(double received_power_margin_db);

inline constexpr double kAttenuationPlateauPs = 0.3;
inline constexpr double kAttenuationThresholdPs = 1.0;
inline constexpr double kAttenuationPlateauMarginDb = 20.0;

}  // namespace wrsync
