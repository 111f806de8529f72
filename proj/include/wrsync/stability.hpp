#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wrsync/timebase.hpp"

namespace wrsync {

enum class Estimator { tdev, adev, mdev };

const char* estimator_name(Estimator estimator);

struct StabilityPoint {
  double tau_s = 0.0;
  std::int64_t m = 0;
  // TDEV in picoseconds; ADEV and MDEV are dimensionless.
  double value = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  // Number of squared terms in the estimator sum.
  std::int64_t n_used = 0;
  // Filled by confidence(): identified phase-noise exponent and the
  // equivalent degrees of freedom behind the bounds.
  int noise_alpha = 0;
  double edf = 0.0;
  // False when too few terms remain for a meaningful interval; the bounds
  // are then [0, inf).
  bool reliable = true;
};

struct StabilityResult {
  Estimator estimator = Estimator::tdev;
  std::vector<StabilityPoint> points;
};

// 1, 2, 4, 8, ... up to floor(n / 3).
std::vector<std::int64_t> default_factors(std::size_t n);

// Overlapping time deviation,
//   TDEV^2(m tau0) = 1 / (6 m^2 (N - 3m + 1)) * sum_j [ sum_{i=j}^{j+m-1} (x[i+2m] - 2x[i+m] + x[i]) ]^2,
// with the inner sum maintained as a sliding window. Factors are sorted and
// deduplicated; each must satisfy 1 <= m <= floor(N/3). Bounds are left equal
// to the estimate until confidence() is applied.
StabilityResult tdev(const PhaseSeries& x, std::span<const std::int64_t> factors);

// Overlapping Allan and modified Allan deviations of the fractional frequency
// implied by x. MDEV(tau) = sqrt(3) TDEV(tau) / tau exactly; at m = 1 MDEV
// equals ADEV.
StabilityResult adev(const PhaseSeries& x, std::span<const std::int64_t> factors);
StabilityResult mdev(const PhaseSeries& x, std::span<const std::int64_t> factors);

struct AdevMdev {
  StabilityResult adev;
  StabilityResult mdev;
};
AdevMdev adev_mdev(const PhaseSeries& x, std::span<const std::int64_t> factors);

// Phase-noise exponent (0 white PM ... -4 random-walk FM) at averaging factor
// m, from the lag-1 autocorrelation of the m-averaged, detrended and
// repeatedly differenced series. Needs at least 32 averaged samples; throws
// InvalidArgument("degenerate series") for zero variance.
int noise_id(const PhaseSeries& x, std::int64_t m);

// Greenhall's equivalent degrees of freedom for the overlapping modified
// Allan variance (and hence TDEV) with frequency-noise exponent alpha_y
// (= phase exponent + 2) at factor m over n phase samples.
double edf_modified(int alpha_y, std::int64_t m, std::size_t n);

// 1-sigma (68.27 %) chi-square bounds for a TDEV or MDEV result computed from
// x. Throws InvalidArgument for ADEV results.
StabilityResult confidence(StabilityResult result, const PhaseSeries& x);

struct AdjacentJitter {
  // std(first differences) / sqrt(2): per-sample jitter for white PM.
  double first_difference_ps = 0.0;
  // TDEV at m = 1 (0 when fewer than 3 samples).
  double tdev_tau0_ps = 0.0;
};

AdjacentJitter adjacent_jitter(const PhaseSeries& x);

}  // namespace wrsync
