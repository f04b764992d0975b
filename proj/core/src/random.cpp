#include "robustagg/random.hpp"

#include "robustagg/common.hpp"

#include <cmath>

namespace robustagg {

namespace {

// splitmix64; used both to expand the seed and to derive substreams.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed) {
  // Pre-mixing avoids the correlated states mt19937_64 produces for
  // near-equal single-word seeds.
  std::mt19937_64 eng;
  eng.seed(mix64(seed));
  return eng;
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seeded_engine(seed)) {}

RandomSource RandomSource::substream(std::uint64_t a, std::uint64_t b) const {
  std::uint64_t derived = mix64(seed_ ^ mix64(a ^ 0x517cc1b727220a95ull) ^ mix64(mix64(b) + 0x2545f4914f6cdd1dull));
  return RandomSource(derived);
}

double RandomSource::uniform() {
  // 53 random bits, offset by half an ulp so the result lies in (0,1).
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double phi = 2.0 * M_PI * u2;
  spare_normal_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

double RandomSource::gamma(double shape) {
  require(shape > 0.0, "gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back by U^{1/shape}.
    double u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = uniform();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomSource::chi_squared(double dof) {
  require(dof > 0.0, "chi_squared: dof must be positive");
  return 2.0 * gamma(0.5 * dof);
}

std::size_t RandomSource::index(std::size_t n) {
  require(n > 0, "index: n must be positive");
  // Rejection-free enough for our n; modulo bias is far below sampling noise,
  // but use Lemire-style rejection anyway to keep the stream well defined.
  std::uint64_t range = static_cast<std::uint64_t>(n);
  std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % range);
}

}  // namespace robustagg
