#include "wrsync/stability.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "wrsync/errors.hpp"

namespace wrsync {

namespace {

constexpr double kPsToSeconds = 1e-12;
// Two-sided 1-sigma coverage of a normal variate.
constexpr double kOneSigmaLowerTail = 0.15865525393145705;
constexpr double kOneSigmaUpperTail = 1.0 - kOneSigmaLowerTail;

std::vector<std::int64_t> checked_factors(std::size_t n, std::span<const std::int64_t> factors) {
  std::vector<std::int64_t> sorted(factors.begin(), factors.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  const auto limit = static_cast<std::int64_t>(n / 3);
  for (std::int64_t m : sorted) {
    if (m < 1 || m > limit) {
      throw InvalidArgument("averaging factor m=" + std::to_string(m) + " out of range [1, " + std::to_string(limit) +
                            "] for " + std::to_string(n) + " samples");
    }
  }
  if (sorted.empty()) throw InvalidArgument("no averaging factors");
  return sorted;
}

// Second differences d[i] = x[i+2m] - 2 x[i+m] + x[i], i in [0, N - 2m).
std::vector<double> second_differences(std::span<const double> x, std::size_t m) {
  const std::size_t count = x.size() - 2 * m;
  std::vector<double> d(count);
  for (std::size_t i = 0; i < count; ++i) d[i] = x[i + 2 * m] - 2.0 * x[i + m] + x[i];
  return d;
}

// sum over windows j of (sum_{i=j}^{j+m-1} d[i])^2, with a compensated
// sliding window so the running sum does not drift over long series.
long double windowed_square_sum(std::span<const double> d, std::size_t m) {
  const std::size_t windows = d.size() - m + 1;
  double sum = 0.0;
  double carry = 0.0;
  auto add = [&](double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      carry += (sum - t) + v;
    } else {
      carry += (v - t) + sum;
    }
    sum = t;
  };
  for (std::size_t i = 0; i < m; ++i) add(d[i]);
  long double total = 0.0L;
  for (std::size_t j = 0; j < windows; ++j) {
    const double s = sum + carry;
    total += static_cast<long double>(s) * s;
    if (j + 1 < windows) {
      add(d[j + m]);
      add(-d[j]);
    }
  }
  return total;
}

// Mean square of the m-window sums of second differences divided by m^2:
// the common kernel of MVAR and TVAR.
struct ModifiedKernel {
  long double value;
  std::int64_t terms;
};

ModifiedKernel modified_kernel(std::span<const double> x, std::int64_t m) {
  const auto mm = static_cast<std::size_t>(m);
  const auto d = second_differences(x, mm);
  const std::int64_t terms = static_cast<std::int64_t>(x.size()) - 3 * m + 1;
  const long double sum = windowed_square_sum(d, mm);
  return {sum / (static_cast<long double>(m) * m * terms), terms};
}

double sw(double t, int alpha) {
  const double at = std::abs(t);
  switch (alpha) {
    case 2: return -at;
    case 1: return t == 0.0 ? 0.0 : t * t * std::log(at);
    case 0: return at * at * at;
    case -1: return t == 0.0 ? 0.0 : -std::pow(t, 4) * std::log(at);
    case -2: return -std::pow(at, 5);
    case -3: return t == 0.0 ? 0.0 : std::pow(t, 6) * std::log(at);
    case -4: return std::pow(at, 7);
    default: throw InvalidArgument("unsupported noise exponent");
  }
}

// Modified estimators use filter factor F = 1.
double sx(double t, int alpha) { return 2.0 * sw(t, alpha) - sw(t - 1.0, alpha) - sw(t + 1.0, alpha); }

// Second-difference (d = 2) structure.
double sz(double t, int alpha) {
  return 6.0 * sx(t, alpha) - 4.0 * sx(t - 1.0, alpha) - 4.0 * sx(t + 1.0, alpha) + sx(t - 2.0, alpha) +
         sx(t + 2.0, alpha);
}

double basic_sum(double J, double M, double S, int alpha) {
  const double z0 = sz(0.0, alpha);
  double total = z0 * z0;
  const double zj = sz(J / S, alpha);
  total += (1.0 - J / M) * zj * zj;
  for (std::int64_t j = 1; j < static_cast<std::int64_t>(J); ++j) {
    const double z = sz(static_cast<double>(j) / S, alpha);
    total += 2.0 * (1.0 - static_cast<double>(j) / M) * z * z;
  }
  return total;
}

// Large-r asymptote 1/edf ~ (a0 - a1 / r) / r for d = 2, indexed by alpha_y.
std::pair<double, double> modified_table(int alpha) {
  switch (alpha) {
    case 2: return {7.0 / 9.0, 0.5};
    case 1: return {0.997, 0.616};
    case 0: return {1.033, 0.607};
    case -1: return {1.048, 0.534};
    default: return {1.302, 0.535};
  }
}

std::vector<double> averaged(std::span<const double> x, std::int64_t m) {
  const std::size_t count = x.size() / static_cast<std::size_t>(m);
  std::vector<double> z(count);
  for (std::size_t k = 0; k < count; ++k) {
    double s = 0.0;
    for (std::int64_t i = 0; i < m; ++i) s += x[k * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)];
    z[k] = s / static_cast<double>(m);
  }
  return z;
}

// Removes the least-squares quadratic in the sample index.
void detrend_quadratic(std::vector<double>& z) {
  const std::size_t n = z.size();
  const double c = (static_cast<double>(n) - 1.0) / 2.0;
  // Orthogonal polynomial basis 1, t, t^2 - q over centred t.
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - c;
    q += t * t;
  }
  q /= static_cast<double>(n);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, n1 = 0.0, n2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - c;
    const double p2 = t * t - q;
    s0 += z[i];
    s1 += z[i] * t;
    s2 += z[i] * p2;
    n1 += t * t;
    n2 += p2 * p2;
  }
  const double b0 = s0 / static_cast<double>(n);
  const double b1 = n1 > 0.0 ? s1 / n1 : 0.0;
  const double b2 = n2 > 0.0 ? s2 / n2 : 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - c;
    z[i] -= b0 + b1 * t + b2 * (t * t - q);
  }
}

double lag1_autocorrelation(const std::vector<double>& z) {
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(z.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double a = z[i] - mean;
    den += a * a;
    if (i + 1 < z.size()) num += a * (z[i + 1] - mean);
  }
  if (!(den > 0.0)) throw InvalidArgument("degenerate series");
  return num / den;
}

}  // namespace

const char* estimator_name(Estimator estimator) {
  switch (estimator) {
    case Estimator::tdev: return "tdev";
    case Estimator::adev: return "adev";
    case Estimator::mdev: return "mdev";
  }
  return "unknown";
}

std::vector<std::int64_t> default_factors(std::size_t n) {
  std::vector<std::int64_t> out;
  const auto limit = static_cast<std::int64_t>(n / 3);
  for (std::int64_t m = 1; m <= limit; m *= 2) out.push_back(m);
  return out;
}

StabilityResult tdev(const PhaseSeries& x, std::span<const std::int64_t> factors) {
  const auto ms = checked_factors(x.size(), factors);
  StabilityResult result{Estimator::tdev, {}};
  for (std::int64_t m : ms) {
    const auto kernel = modified_kernel(x.samples(), m);
    const double value = static_cast<double>(std::sqrt(kernel.value / 6.0L));
    StabilityPoint p;
    p.m = m;
    p.tau_s = static_cast<double>(m) * x.tau0();
    p.value = p.ci_low = p.ci_high = value;
    p.n_used = kernel.terms;
    result.points.push_back(p);
  }
  return result;
}

StabilityResult mdev(const PhaseSeries& x, std::span<const std::int64_t> factors) {
  const auto ms = checked_factors(x.size(), factors);
  StabilityResult result{Estimator::mdev, {}};
  for (std::int64_t m : ms) {
    const auto kernel = modified_kernel(x.samples(), m);
    const long double tau = static_cast<long double>(m) * x.tau0();
    const double value = static_cast<double>(std::sqrt(kernel.value / (2.0L * tau * tau)) * kPsToSeconds);
    StabilityPoint p;
    p.m = m;
    p.tau_s = static_cast<double>(tau);
    p.value = p.ci_low = p.ci_high = value;
    p.n_used = kernel.terms;
    result.points.push_back(p);
  }
  return result;
}

StabilityResult adev(const PhaseSeries& x, std::span<const std::int64_t> factors) {
  const auto ms = checked_factors(x.size(), factors);
  StabilityResult result{Estimator::adev, {}};
  for (std::int64_t m : ms) {
    // Same summation as the modified kernel at m = 1, so MDEV(1) == ADEV(1).
    const auto d = second_differences(x.samples(), static_cast<std::size_t>(m));
    const long double sum = windowed_square_sum(d, 1);
    const auto terms = static_cast<std::int64_t>(d.size());
    const long double tau = static_cast<long double>(m) * x.tau0();
    const long double mean_square = sum / (1.0L * 1 * terms);
    const double value = static_cast<double>(std::sqrt(mean_square / (2.0L * tau * tau)) * kPsToSeconds);
    StabilityPoint p;
    p.m = m;
    p.tau_s = static_cast<double>(tau);
    p.value = p.ci_low = p.ci_high = value;
    p.n_used = terms;
    result.points.push_back(p);
  }
  return result;
}

AdevMdev adev_mdev(const PhaseSeries& x, std::span<const std::int64_t> factors) {
  return {adev(x, factors), mdev(x, factors)};
}

int noise_id(const PhaseSeries& x, std::int64_t m) {
  if (m < 1) throw InvalidArgument("averaging factor must be >= 1");
  auto z = averaged(x.samples(), m);
  if (z.size() < 32) {
    throw InvalidArgument("too-short series: " + std::to_string(z.size()) + " averaged samples, need 32");
  }
  detrend_quadratic(z);
  constexpr int kMaxDifferences = 2;
  for (int d = 0;; ++d) {
    const double r1 = lag1_autocorrelation(z);
    const double delta = r1 / (1.0 + r1);
    if (delta < 0.25 || d >= kMaxDifferences) {
      const int alpha = -static_cast<int>(std::lround(2.0 * delta)) - 2 * d;
      return std::clamp(alpha, -4, 0);
    }
    std::vector<double> next(z.size() - 1);
    for (std::size_t i = 0; i + 1 < z.size(); ++i) next[i] = z[i + 1] - z[i];
    z = std::move(next);
  }
}

double edf_modified(int alpha_y, std::int64_t m, std::size_t n) {
  alpha_y = std::clamp(alpha_y, -2, 2);
  constexpr double kJMax = 100.0;
  const double S = static_cast<double>(m);
  const double L = 3.0 * static_cast<double>(m);
  const double M = 1.0 + std::floor(S * (static_cast<double>(n) - L) / static_cast<double>(m));
  if (M < 1.0) throw InvalidArgument("averaging factor too large for edf");
  const double J = std::min(M, 3.0 * S);
  const double r = M / S;
  const double z0 = sz(0.0, alpha_y);
  if (J <= kJMax) {
    return 1.0 / (basic_sum(J, M, S, alpha_y) / (z0 * z0 * M));
  }
  if (r > 3.0) {
    const auto [a0, a1] = modified_table(alpha_y);
    return 1.0 / ((a0 - a1 / r) / r);
  }
  const double m_prime = kJMax / r;
  return 1.0 / (basic_sum(kJMax, kJMax, m_prime, alpha_y) / (z0 * z0 * kJMax));
}

StabilityResult confidence(StabilityResult result, const PhaseSeries& x) {
  if (result.estimator == Estimator::adev) {
    throw InvalidArgument("confidence bounds are implemented for TDEV and MDEV");
  }
  int last_alpha = 0;
  for (auto& p : result.points) {
    if (p.n_used < 8) {
      p.reliable = false;
      p.ci_low = 0.0;
      p.ci_high = std::numeric_limits<double>::infinity();
      p.noise_alpha = last_alpha;
      p.edf = 0.0;
      continue;
    }
    if (x.size() / static_cast<std::size_t>(p.m) >= 32) {
      try {
        last_alpha = noise_id(x, p.m);
      } catch (const InvalidArgument&) {
        // degenerate at this m: keep the previous identification
      }
    }
    p.noise_alpha = last_alpha;
    p.edf = edf_modified(last_alpha + 2, p.m, x.size());
    p.reliable = true;
    if (p.value == 0.0) {
      p.ci_low = p.ci_high = 0.0;
      continue;
    }
    const boost::math::chi_squared chi2(p.edf);
    const double upper_quantile = boost::math::quantile(chi2, kOneSigmaUpperTail);
    const double lower_quantile = boost::math::quantile(chi2, kOneSigmaLowerTail);
    p.ci_low = p.value * std::sqrt(p.edf / upper_quantile);
    p.ci_high = p.value * std::sqrt(p.edf / lower_quantile);
  }
  return result;
}

AdjacentJitter adjacent_jitter(const PhaseSeries& x) {
  AdjacentJitter out;
  if (x.size() < 2) return out;
  const auto s = x.samples();
  const std::size_t n = s.size() - 1;
  long double mean = 0.0L;
  for (std::size_t i = 0; i < n; ++i) mean += s[i + 1] - s[i];
  mean /= static_cast<long double>(n);
  long double ss = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = (s[i + 1] - s[i]) - mean;
    ss += d * d;
  }
  const long double var = n > 1 ? ss / static_cast<long double>(n - 1) : 0.0L;
  out.first_difference_ps = static_cast<double>(std::sqrt(var / 2.0L));
  if (x.size() >= 3) {
    const std::int64_t one = 1;
    out.tdev_tau0_ps = tdev(x, std::span(&one, 1)).points.front().value;
  }
  return out;
}

}  // namespace wrsync
