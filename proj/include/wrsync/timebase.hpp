#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wrsync {

// Raw event time in integer femtoseconds since capture start. int64 spans
// about +/-106 days, far beyond any capture; products that could overflow are
// formed in 128-bit arithmetic.
using Femtoseconds = std::int64_t;

inline constexpr std::int64_t kFemtosecondsPerSecond = 1'000'000'000'000'000;
inline constexpr double kFemtosecondsPerPicosecond = 1000.0;

// Exact rational frequency in hertz, kept in lowest terms.
class Frequency {
 public:
  // Throws InvalidArgument unless numerator > 0 and denominator > 0.
  explicit Frequency(std::int64_t numerator, std::int64_t denominator = 1);

  // Accepts "80000000", "80e6", "12.5e6", "1e7/3".
  static Frequency parse(const std::string& text);

  std::int64_t numerator() const { return num_; }
  std::int64_t denominator() const { return den_; }
  double hertz() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  double period_s() const { return static_cast<double>(den_) / static_cast<double>(num_); }

  // Exact value of i / f in femtoseconds, rounded to nearest.
  Femtoseconds index_time_fs(std::int64_t index) const;

  // True when the period is an integer number of femtoseconds.
  bool has_integral_period_fs() const;

  // this / other as an exact rational. Returns {numerator, denominator}.
  std::pair<std::int64_t, std::int64_t> ratio_to(const Frequency& other) const;

  std::string to_string() const;

  friend bool operator==(const Frequency&, const Frequency&) = default;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

// Event stream of one tagger channel. Timestamps are non-decreasing.
struct TimeTagSeries {
  std::uint32_t channel = 0;
  std::vector<Femtoseconds> timestamps;

  bool is_sorted() const;
};

// Uniformly sampled time error x[i] in picoseconds at interval tau0.
class PhaseSeries {
 public:
  // Throws InvalidArgument on tau0 <= 0, empty samples or non-finite values.
  PhaseSeries(double tau0_s, std::vector<double> samples_ps, std::string label = {});

  // All-zero series of length n.
  static PhaseSeries zeros(double tau0_s, std::size_t n, std::string label = {});

  double tau0() const { return tau0_; }
  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }
  const std::string& label() const { return label_; }

  PhaseSeries with_label(std::string label) const;
  std::vector<double> release() && { return std::move(samples_); }

 private:
  double tau0_;
  std::vector<double> samples_;
  std::string label_;
};

// x[i] = t[i] - i/nominal - t[0] in picoseconds, tau0 = 1/nominal. Linear
// frequency offsets are kept.
PhaseSeries series_from_tags(const TimeTagSeries& tags, const Frequency& nominal);

}  // namespace wrsync
