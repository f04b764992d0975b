#pragma once

#include <cstdint>
#include <random>

namespace robustagg {

/// Seeded random source. Identical seeds reproduce identical streams
/// bit-for-bit: all variate transforms are implemented here rather than
/// delegated to implementation-defined std distributions.
///
/// A RandomSource is single-owner. Parallel consumers must split off
/// independent substreams via substream(); streams derived with distinct
/// tags never share state.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  /// Derive an independently seeded stream from (seed, a, b).
  RandomSource substream(std::uint64_t a, std::uint64_t b = 0) const;

  /// Raw 64 uniform bits.
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on the open interval (0,1); safe to feed into quantiles.
  double uniform();

  /// Standard normal via Box-Muller (pair cached).
  double normal();

  /// Gamma(shape, scale 1), Marsaglia-Tsang squeeze.
  double gamma(double shape);

  /// Chi-squared with dof > 0 (possibly non-integer).
  double chi_squared(double dof);

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace robustagg
