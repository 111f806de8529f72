#pragma once

#include <cstdint>
#include <random>

namespace wrsync {

// Public seed-mixing function (splitmix64 finalizer over parent ^ golden*index).
// Child streams for terms, nodes and trials are derived with it so that a
// scenario seed reproduces across runs and platforms.
std::uint64_t mix_seed(std::uint64_t parent, std::uint64_t index);

// Standard normal deviates from mt19937_64 via Box-Muller. Unlike
// std::normal_distribution the output sequence is fixed by this code, not by
// the standard library vendor.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : engine_(seed) {}

  double next();
  // Uniform in [0, 1).
  double uniform();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace wrsync
