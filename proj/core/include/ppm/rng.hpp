#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ppm {

/// Identifier written into every run manifest. Bump the suffix whenever any
/// draw below changes, so old outputs can be told apart from new ones.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64;seed=splitmix64(seed,stream);uniform=u53;exp=-log(1-u);normal=marsaglia-polar;v1";

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seedable, splittable generator. Distribution transforms are written out
/// here rather than taken from <random> because the standard leaves those
/// implementation-defined, which would break cross-toolchain reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent child stream; the parent is left untouched.
  Rng split(std::uint64_t stream) const { return Rng(seed_, stream_ * 0x9E3779B97F4A7C15ULL + stream + 1); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on the open interval (0, 1).
  double uniform_open() noexcept { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double exponential(double rate) noexcept;
  double normal() noexcept;

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ppm
