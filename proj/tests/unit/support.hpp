#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace testsupport {

// Definitional triple sums, written straight from the textbook formulas and
// kept deliberately free of the sliding window used by the library.
inline double naive_tdev(const std::vector<double>& x, std::int64_t m) {
  const auto n = static_cast<std::int64_t>(x.size());
  long double total = 0.0L;
  const std::int64_t terms = n - 3 * m + 1;
  for (std::int64_t j = 0; j < terms; ++j) {
    long double inner = 0.0L;
    for (std::int64_t i = j; i < j + m; ++i) {
      inner += static_cast<long double>(x[i + 2 * m]) - 2.0L * x[i + m] + x[i];
    }
    total += inner * inner;
  }
  return static_cast<double>(std::sqrt(total / (6.0L * m * m * terms)));
}

// x in ps, result dimensionless.
inline double naive_mdev(const std::vector<double>& x, std::int64_t m, double tau0) {
  const auto n = static_cast<std::int64_t>(x.size());
  const long double tau = static_cast<long double>(m) * tau0;
  long double total = 0.0L;
  const std::int64_t terms = n - 3 * m + 1;
  for (std::int64_t j = 0; j < terms; ++j) {
    long double inner = 0.0L;
    for (std::int64_t i = j; i < j + m; ++i) {
      inner += (static_cast<long double>(x[i + 2 * m]) - 2.0L * x[i + m] + x[i]) * 1e-12L;
    }
    total += inner * inner;
  }
  return static_cast<double>(std::sqrt(total / (2.0L * m * m * tau * tau * terms)));
}

inline double naive_adev(const std::vector<double>& x, std::int64_t m, double tau0) {
  const auto n = static_cast<std::int64_t>(x.size());
  const long double tau = static_cast<long double>(m) * tau0;
  long double total = 0.0L;
  const std::int64_t terms = n - 2 * m;
  for (std::int64_t i = 0; i < terms; ++i) {
    const long double d = (static_cast<long double>(x[i + 2 * m]) - 2.0L * x[i + m] + x[i]) * 1e-12L;
    total += d * d;
  }
  return static_cast<double>(std::sqrt(total / (2.0L * tau * tau * terms)));
}

inline std::vector<double> random_walk_plus_white(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  double walk = 0.0;
  for (auto& v : x) {
    walk += 0.3 * g(rng);
    v = walk + g(rng);
  }
  return x;
}

inline double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double a : v) mean += a;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double a : v) ss += (a - mean) * (a - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double correlation(const std::vector<double>& a, const std::vector<double>& b) {
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= static_cast<double>(a.size());
  mb /= static_cast<double>(b.size());
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("wrsync_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testsupport
