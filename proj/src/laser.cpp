#include "wrsync/laser.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "wrsync/errors.hpp"
#include "wrsync/rng.hpp"

namespace wrsync {

double PLLConfig::natural_frequency() const {
  const double z2 = 2.0 * damping * damping;
  const double bandwidth_over_wn = std::sqrt(1.0 + z2 + std::sqrt((1.0 + z2) * (1.0 + z2) + 1.0));
  return 2.0 * std::numbers::pi * loop_bandwidth_hz / bandwidth_over_wn;
}

std::int64_t PLLConfig::multiplication() const {
  const auto [num, den] = output_rate.ratio_to(reference_rate);
  return den == 1 ? num : 0;
}

void validate(const PLLConfig& pll, const std::string& context, std::vector<std::string>& issues) {
  if (!(pll.loop_bandwidth_hz > 0.0)) issues.push_back(context + ": loop_bandwidth_hz must be > 0");
  if (!(pll.damping > 0.0)) issues.push_back(context + ": damping must be > 0");
  if (pll.multiplication() < 1) {
    issues.push_back(context + ": output_rate / reference_rate must be a positive integer, got " +
                     pll.output_rate.to_string() + " / " + pll.reference_rate.to_string());
  }
}

void validate(const MLLNode& node, const std::string& context, std::vector<std::string>& issues) {
  if (node.name.empty()) issues.push_back(context + ": name must not be empty");
  validate(node.pll, context + ".pll", issues);
  validate(node.cavity_noise, context + ".cavity_noise", issues);
  if (!(node.sg_jitter_ps >= 0.0)) issues.push_back(context + ": sg_jitter_ps must be >= 0");
}

LoopGains loop_response(const PLLConfig& pll, double f_hz) {
  if (!(f_hz > 0.0)) throw InvalidArgument("frequency must be > 0");
  const double wn = pll.natural_frequency();
  const std::complex<double> s(0.0, 2.0 * std::numbers::pi * f_hz);
  const std::complex<double> den = s * s + 2.0 * pll.damping * wn * s + wn * wn;
  const std::complex<double> lp = (2.0 * pll.damping * wn * s + wn * wn) / den;
  const std::complex<double> hp = (s * s) / den;
  return {std::abs(lp), std::abs(hp)};
}

std::vector<double> loop_lowpass(std::span<const double> input, const PLLConfig& pll, double tau0_s) {
  std::vector<double> out(input.size());
  if (input.empty()) return out;
  const double wn = pll.natural_frequency();
  const double zeta = pll.damping;
  const double k = 2.0 / tau0_s;
  const double a0 = k * k + 2.0 * zeta * wn * k + wn * wn;
  const double a1 = (2.0 * wn * wn - 2.0 * k * k) / a0;
  const double a2 = (k * k - 2.0 * zeta * wn * k + wn * wn) / a0;
  const double b0 = (2.0 * zeta * wn * k + wn * wn) / a0;
  const double b1 = (2.0 * wn * wn) / a0;
  const double b2 = (wn * wn - 2.0 * zeta * wn * k) / a0;

  // Transposed direct form II, states preloaded with the steady state for a
  // constant input equal to input[0].
  const double u0 = input[0];
  double s2 = (b2 - a2) * u0;
  double s1 = (b1 - a1) * u0 + s2;
  for (std::size_t i = 0; i < input.size(); ++i) {
    const double x = input[i];
    const double y = b0 * x + s1;
    s1 = b1 * x - a1 * y + s2;
    s2 = b2 * x - a2 * y;
    out[i] = y;
  }
  return out;
}

PhaseSeries discipline(const PhaseSeries& reference, const MLLNode& node, std::uint64_t seed) {
  std::vector<std::string> issues;
  validate(node, "laser '" + node.name + "'", issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  const double tau0 = reference.tau0();
  const double cycles = tau0 * node.pll.reference_rate.hertz();
  if (cycles < 1.0 - 1e-9 || std::abs(cycles - std::round(cycles)) > 1e-6 * cycles) {
    throw InvalidArgument("reference tau0 is not a whole number of reference periods");
  }
  const std::size_t n = reference.size();

  // out = LP(r + sg) + (c - LP(c)) = LP(r + sg - c) + c
  std::vector<double> drive(reference.samples().begin(), reference.samples().end());
  std::vector<double> cavity(n, 0.0);
  if (n >= 2) {
    if (node.sg_jitter_ps > 0.0) {
      const auto sg = gen_power_law({0, node.sg_jitter_ps}, n, tau0, mix_seed(seed, 0));
      for (std::size_t i = 0; i < n; ++i) drive[i] += sg[i];
    }
    if (!node.cavity_noise.empty()) {
      const auto c = generate(node.cavity_noise, n, tau0, mix_seed(seed, 1));
      cavity.assign(c.samples().begin(), c.samples().end());
      for (std::size_t i = 0; i < n; ++i) drive[i] -= cavity[i];
    }
  }
  std::vector<double> out = loop_lowpass(drive, node.pll, tau0);
  for (std::size_t i = 0; i < n; ++i) out[i] += cavity[i];
  return PhaseSeries(tau0, std::move(out), node.name);
}

}  // namespace wrsync
