#include <catch2/catch_amalgamated.hpp>

#include "robustagg/stats.hpp"

using namespace robustagg;

TEST_CASE("type-7 quantile interpolates linearly", "[stats]") {
  std::vector<double> xs{1.0, 2.0, 4.0};
  REQUIRE(quantile_type7(xs, 0.5) == Catch::Approx(2.0));
  REQUIRE(quantile_type7(xs, 0.25) == Catch::Approx(1.5));
  REQUIRE(quantile_type7(xs, 0.75) == Catch::Approx(3.0));
}

TEST_CASE("ks statistic detects the right scale of deviation", "[stats]") {
  std::vector<double> xs;
  const int n = 1000;
  for (int i = 0; i < n; ++i) xs.push_back((i + 0.5) / n);
  auto uniform_cdf = [](double v) { return std::clamp(v, 0.0, 1.0); };
  REQUIRE(ks_statistic(xs, uniform_cdf) < 1e-3);

  for (auto& x : xs) x *= 0.9;  // compress: D should be about 0.1
  REQUIRE(ks_statistic(xs, uniform_cdf) == Catch::Approx(0.1).margin(0.01));
}

TEST_CASE("weighted resampling follows the weights", "[stats]") {
  RandomSource rng(123);
  std::vector<double> w{1.0, 0.0, 3.0};
  auto idx = resample_indices(w, 40000, rng);
  std::vector<int> counts(3, 0);
  for (auto i : idx) counts[i]++;
  REQUIRE(counts[1] == 0);
  REQUIRE(static_cast<double>(counts[2]) / 40000.0 == Catch::Approx(0.75).margin(0.01));
}
