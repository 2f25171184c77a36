#pragma once

// Reproducible randomness. The stream generator is std::mt19937_64 (its
// output sequence is fixed by the C++ standard); seeds for independent
// attempts, trials and stages are derived from one master seed with the
// splitmix64 finalizer:
//
//   stage seed    = master + (stage << 32)
//   attempt seed  = splitmix64(stage seed + attempt)     attempt = 1, 2, ...
//
// Uniform reals use the top 53 bits of one draw; categorical sampling inverts
// the cumulative sum, so results do not depend on the standard library's
// distribution implementations.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace randcomp::rng {

inline constexpr std::string_view kGeneratorName = "mt19937_64+splitmix64";

using Engine = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stage_seed(std::uint64_t master, std::uint64_t stage) noexcept {
  return master + (stage << 32);
}

constexpr std::uint64_t attempt_seed(std::uint64_t stage_seed, std::uint64_t attempt) noexcept {
  return splitmix64(stage_seed + attempt);
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Engine& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

/// Inverse-CDF sampler over a finite PMF. Zero-weight values are never drawn.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> probs);
  std::size_t operator()(Engine& gen) const;

 private:
  std::vector<double> cdf_;
  std::size_t last_positive_ = 0;
};

}  // namespace randcomp::rng
