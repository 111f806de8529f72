#pragma once

#include <optional>
#include <span>
#include <vector>

namespace wrsync {

// Single-photon wavepacket width. Either field may be given; the other is
// derived on demand.
struct WavepacketSpec {
  std::optional<double> sigma_ps;
  std::optional<double> fwhm_ps;

  static WavepacketSpec from_sigma(double sigma_ps);
  static WavepacketSpec from_fwhm(double fwhm_ps);
  // Throws InvalidArgument if neither is set, either is non-positive, or the
  // two disagree beyond 1e-9 relative.
  double sigma() const;
};

struct JitterSpec {
  // Relative RMS timing jitter between the two sources.
  double delta_t_ps = 0.0;
};

double sigma_from_fwhm(double fwhm_ps);
double fwhm_from_sigma(double sigma_ps);

// I = (1 + dt^2 / sigma^2)^(-1/2).
double indistinguishability(double delta_t_ps, double sigma_ps);
double indistinguishability(const JitterSpec& jitter, const WavepacketSpec& wavepacket);

// Inverse: dt = sigma sqrt(1/I^2 - 1) for 0 < I <= 1.
double required_jitter(double target_i, const WavepacketSpec& wavepacket);

struct OverlapCurve {
  std::vector<double> t_ps;
  std::vector<double> envelope0;
  std::vector<double> envelope_dt;
  // Normalized density of relative delays (std dt). All zeros when dt = 0.
  std::vector<double> delay_pdf;
};

// Grid must be non-empty and ascending.
OverlapCurve overlap_curve(const JitterSpec& jitter, const WavepacketSpec& wavepacket, std::span<const double> grid_ps);

struct VisibilityCurve {
  std::vector<double> dt_over_sigma;
  std::vector<double> i;
};

// I against dt / sigma on [0, max_ratio] with `points` samples.
VisibilityCurve visibility_curve(double max_ratio = 3.0, std::size_t points = 301);

}  // namespace wrsync
