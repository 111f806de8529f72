#include "wrsync/noisegen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "wrsync/errors.hpp"
#include "wrsync/rng.hpp"

namespace wrsync {

namespace {

void require_length(std::size_t n, double tau0_s) {
  if (n < 2) throw InvalidArgument("series length must be at least 2");
  if (!(tau0_s > 0.0) || !std::isfinite(tau0_s)) throw InvalidArgument("tau0 must be positive");
}

// Removes the mean and scales to the requested sample standard deviation.
void calibrate_rms(std::vector<double>& x, double rms) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double& v : x) {
    v -= mean;
    ss += v * v;
  }
  const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
  if (sd == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    return;
  }
  const double k = rms / sd;
  for (double& v : x) v *= k;
}

void fill_white(std::span<double> out, std::uint64_t seed) {
  GaussianSource gauss(seed);
  for (double& v : out) v = gauss.next();
}

}  // namespace

void validate(const PowerLawTerm& term, const std::string& context, std::vector<std::string>& issues) {
  if (term.alpha < -4 || term.alpha > 0) {
    issues.push_back(context + ": unsupported exponent " + std::to_string(term.alpha));
  }
  if (!(term.rms_at_tau0_ps >= 0.0) || !std::isfinite(term.rms_at_tau0_ps)) {
    issues.push_back(context + ": rms_at_tau0_ps must be >= 0");
  }
}

void validate(const BumpTerm& term, const std::string& context, std::vector<std::string>& issues) {
  if (!(term.center_frequency_hz > 0.0) || !std::isfinite(term.center_frequency_hz)) {
    issues.push_back(context + ": center_frequency_hz must be > 0");
  }
  if (!(term.relative_bandwidth > 0.0 && term.relative_bandwidth <= 2.0)) {
    issues.push_back(context + ": relative_bandwidth must be in (0, 2]");
  }
  if (!(term.rms_ps >= 0.0) || !std::isfinite(term.rms_ps)) {
    issues.push_back(context + ": rms_ps must be >= 0");
  }
}

void validate(const DriftTerm& term, const std::string& context, std::vector<std::string>& issues) {
  if (!(term.peak_to_peak_ps >= 0.0) || !(term.period_s >= 0.0) || !(term.random_walk_rms_per_sqrt_s >= 0.0)) {
    issues.push_back(context + ": drift fields must be >= 0");
  }
  if (term.peak_to_peak_ps > 0.0 && !(term.period_s > 0.0)) {
    issues.push_back(context + ": sinusoidal drift needs period_s > 0");
  }
}

void validate(const NoiseSpec& spec, const std::string& context, std::vector<std::string>& issues) {
  for (std::size_t i = 0; i < spec.power_law_terms.size(); ++i) {
    validate(spec.power_law_terms[i], context + ".power_law[" + std::to_string(i) + "]", issues);
  }
  for (std::size_t i = 0; i < spec.bump_terms.size(); ++i) {
    validate(spec.bump_terms[i], context + ".bump[" + std::to_string(i) + "]", issues);
  }
  for (std::size_t i = 0; i < spec.drift_terms.size(); ++i) {
    validate(spec.drift_terms[i], context + ".drift[" + std::to_string(i) + "]", issues);
  }
}

PhaseSeries gen_power_law(const PowerLawTerm& term, std::size_t n, double tau0_s, std::uint64_t seed) {
  require_length(n, tau0_s);
  if (term.alpha < -4 || term.alpha > 0) {
    throw InvalidArgument("unsupported exponent");
  }
  if (!(term.rms_at_tau0_ps >= 0.0)) throw InvalidArgument("rms_at_tau0_ps must be >= 0");
  if (term.rms_at_tau0_ps == 0.0) return PhaseSeries::zeros(tau0_s, n, "power_law");

  std::vector<double> x(n);
  if (term.alpha == 0) {
    fill_white(x, seed);
    for (double& v : x) v *= term.rms_at_tau0_ps;
    return PhaseSeries(tau0_s, std::move(x), "power_law");
  }

  // Shape white noise by f^(alpha/2) over twice the length and keep the first
  // half, so the circular wrap of the transform does not tie the ends together.
  detail::RealFft fft(2 * n);
  fill_white(fft.real(), seed);
  fft.forward();
  auto spectrum = fft.spectrum();
  spectrum[0] = 0.0;
  const double exponent = term.alpha / 2.0;
  for (std::size_t k = 1; k < spectrum.size(); ++k) {
    spectrum[k] *= std::pow(static_cast<double>(k), exponent);
  }
  fft.inverse();
  std::copy_n(fft.real().begin(), n, x.begin());
  calibrate_rms(x, term.rms_at_tau0_ps);
  return PhaseSeries(tau0_s, std::move(x), "power_law");
}

PhaseSeries gen_bump(const BumpTerm& term, std::size_t n, double tau0_s, std::uint64_t seed) {
  require_length(n, tau0_s);
  std::vector<std::string> issues;
  validate(term, "bump", issues);
  if (!issues.empty()) throw InvalidArgument(issues.front());
  const double nyquist = 0.5 / tau0_s;
  if (term.center_frequency_hz >= nyquist) {
    throw InvalidArgument("bump center frequency " + std::to_string(term.center_frequency_hz) +
                          " Hz is not below Nyquist " + std::to_string(nyquist) + " Hz");
  }
  if (term.rms_ps == 0.0) return PhaseSeries::zeros(tau0_s, n, "bump");

  detail::RealFft fft(n);
  fill_white(fft.real(), seed);
  fft.forward();
  auto spectrum = fft.spectrum();
  const double bin_hz = 1.0 / (static_cast<double>(n) * tau0_s);
  const double lo = term.center_frequency_hz * (1.0 - term.relative_bandwidth / 2.0);
  const double hi = term.center_frequency_hz * (1.0 + term.relative_bandwidth / 2.0);
  std::size_t in_band = 0;
  for (std::size_t k = 0; k < spectrum.size(); ++k) {
    const double f = static_cast<double>(k) * bin_hz;
    if (k == 0 || f <= lo || f >= hi) {
      spectrum[k] = 0.0;
      continue;
    }
    const double s = std::sin(std::numbers::pi * (f - lo) / (hi - lo));
    spectrum[k] *= s * s;
    ++in_band;
  }
  if (in_band == 0) {
    throw InvalidArgument("bump band is narrower than the frequency resolution of the series");
  }
  fft.inverse();
  std::vector<double> x(fft.real().begin(), fft.real().end());
  calibrate_rms(x, term.rms_ps);
  return PhaseSeries(tau0_s, std::move(x), "bump");
}

PhaseSeries gen_drift(const DriftTerm& term, std::size_t n, double tau0_s, std::uint64_t seed) {
  require_length(n, tau0_s);
  std::vector<std::string> issues;
  validate(term, "drift", issues);
  if (!issues.empty()) throw InvalidArgument(issues.front());
  std::vector<double> x(n, 0.0);
  GaussianSource rng(seed);
  if (term.peak_to_peak_ps > 0.0) {
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    const double amplitude = term.peak_to_peak_ps / 2.0;
    const double omega = 2.0 * std::numbers::pi / term.period_s;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = amplitude * std::sin(omega * static_cast<double>(i) * tau0_s + phase);
    }
  }
  if (term.random_walk_rms_per_sqrt_s > 0.0) {
    const double step = term.random_walk_rms_per_sqrt_s * std::sqrt(tau0_s);
    double walk = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
      walk += step * rng.next();
      x[i] += walk;
    }
  }
  return PhaseSeries(tau0_s, std::move(x), "drift");
}

PhaseSeries generate(const NoiseSpec& spec, std::size_t n, double tau0_s, std::uint64_t seed, double bump_scale) {
  require_length(n, tau0_s);
  std::vector<double> total(n, 0.0);
  std::uint64_t index = 0;
  auto accumulate = [&](const PhaseSeries& part) {
    const auto s = part.samples();
    for (std::size_t i = 0; i < n; ++i) total[i] += s[i];
  };
  for (const auto& term : spec.power_law_terms) {
    accumulate(gen_power_law(term, n, tau0_s, mix_seed(seed, index++)));
  }
  for (auto term : spec.bump_terms) {
    term.rms_ps *= bump_scale;
    accumulate(gen_bump(term, n, tau0_s, mix_seed(seed, index++)));
  }
  for (const auto& term : spec.drift_terms) {
    accumulate(gen_drift(term, n, tau0_s, mix_seed(seed, index++)));
  }
  return PhaseSeries(tau0_s, std::move(total), "noise");
}

double attenuation_jitter(double margin_db) {
  if (std::isnan(margin_db) || margin_db < 0.0) {
    throw InvalidArgument("link below sensitivity threshold");
  }
  if (margin_db >= kAttenuationPlateauMarginDb) return kAttenuationPlateauPs;
  const double slope = (kAttenuationThresholdPs - kAttenuationPlateauPs) / kAttenuationPlateauMarginDb;
  return kAttenuationThresholdPs - slope * margin_db;
}

double attenuation_bump_scale(double margin_db) { return attenuation_jitter(margin_db) / kAttenuationPlateauPs; }

}  // namespace wrsync
