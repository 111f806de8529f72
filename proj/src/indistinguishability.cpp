#include "wrsync/indistinguishability.hpp"

#include <cmath>
#include <numbers>

#include "wrsync/errors.hpp"

namespace wrsync {

namespace {

const double kFwhmPerSigma = 2.0 * std::sqrt(2.0 * std::numbers::ln2);

double gaussian(double t, double center, double sigma) {
  const double u = (t - center) / sigma;
  return std::exp(-0.5 * u * u);
}

}  // namespace

WavepacketSpec WavepacketSpec::from_sigma(double sigma_ps) { return {sigma_ps, std::nullopt}; }
WavepacketSpec WavepacketSpec::from_fwhm(double fwhm_ps) { return {std::nullopt, fwhm_ps}; }

double WavepacketSpec::sigma() const {
  if (!sigma_ps && !fwhm_ps) throw InvalidArgument("wavepacket width not set");
  if (sigma_ps && !(*sigma_ps > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (!sigma_ps) return sigma_from_fwhm(*fwhm_ps);
  if (fwhm_ps) {
    const double implied = sigma_from_fwhm(*fwhm_ps);
    if (std::abs(implied - *sigma_ps) > 1e-9 * *sigma_ps) {
      throw InvalidArgument("sigma and fwhm disagree");
    }
  }
  return *sigma_ps;
}

double sigma_from_fwhm(double fwhm_ps) {
  if (!(fwhm_ps > 0.0)) throw InvalidArgument("fwhm must be > 0");
  return fwhm_ps / kFwhmPerSigma;
}

double fwhm_from_sigma(double sigma_ps) {
  if (!(sigma_ps > 0.0)) throw InvalidArgument("sigma must be > 0");
  return sigma_ps * kFwhmPerSigma;
}

double indistinguishability(double delta_t_ps, double sigma_ps) {
  if (!(sigma_ps > 0.0)) throw InvalidArgument("sigma must be > 0");
  if (!(delta_t_ps >= 0.0)) throw InvalidArgument("delta_t must be >= 0");
  const double r = delta_t_ps / sigma_ps;
  return 1.0 / std::sqrt(1.0 + r * r);
}

double indistinguishability(const JitterSpec& jitter, const WavepacketSpec& wavepacket) {
  return indistinguishability(jitter.delta_t_ps, wavepacket.sigma());
}

double required_jitter(double target_i, const WavepacketSpec& wavepacket) {
  if (!(target_i > 0.0 && target_i <= 1.0)) throw InvalidArgument("target indistinguishability must be in (0, 1]");
  return wavepacket.sigma() * std::sqrt(1.0 / (target_i * target_i) - 1.0);
}

OverlapCurve overlap_curve(const JitterSpec& jitter, const WavepacketSpec& wavepacket, std::span<const double> grid_ps) {
  if (grid_ps.empty()) throw InvalidArgument("empty delay grid");
  for (std::size_t i = 1; i < grid_ps.size(); ++i) {
    if (!(grid_ps[i] > grid_ps[i - 1])) throw InvalidArgument("delay grid must be ascending");
  }
  const double sigma = wavepacket.sigma();
  const double dt = jitter.delta_t_ps;
  if (!(dt >= 0.0)) throw InvalidArgument("delta_t must be >= 0");
  OverlapCurve c;
  c.t_ps.assign(grid_ps.begin(), grid_ps.end());
  for (double t : grid_ps) {
    c.envelope0.push_back(gaussian(t, 0.0, sigma));
    c.envelope_dt.push_back(gaussian(t, dt, sigma));
    c.delay_pdf.push_back(dt > 0.0 ? gaussian(t, 0.0, dt) / (dt * std::sqrt(2.0 * std::numbers::pi)) : 0.0);
  }
  return c;
}

VisibilityCurve visibility_curve(double max_ratio, std::size_t points) {
  if (!(max_ratio > 0.0) || points < 2) throw InvalidArgument("visibility curve needs max_ratio > 0 and >= 2 points");
  VisibilityCurve c;
  for (std::size_t k = 0; k < points; ++k) {
    const double r = max_ratio * static_cast<double>(k) / static_cast<double>(points - 1);
    c.dt_over_sigma.push_back(r);
    c.i.push_back(indistinguishability(r, 1.0));
  }
  return c;
}

}  // namespace wrsync
