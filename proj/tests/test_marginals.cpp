#include <catch2/catch_amalgamated.hpp>

#include "robustagg/marginals.hpp"
#include "robustagg/random.hpp"
#include "robustagg/stats.hpp"

#include <cmath>
#include <fstream>
#include <vector>

using namespace robustagg;

TEST_CASE("quantile identities", "[marginals]") {
  REQUIRE(MarginalSpec::uniform01().quantile(0.3) == Catch::Approx(0.3).margin(1e-15));
  REQUIRE(MarginalSpec::empirical({1.0, 2.0, 3.0}).quantile(0.5) == Catch::Approx(2.0));

  SECTION("lognormal moment matching") {
    auto lm = MarginalSpec::lognormal_moments(840.735, 694.613);
    // Independent recomputation of the log-scale parameters.
    double sigma2 = std::log(1.0 + std::pow(694.613 / 840.735, 2.0));
    double mu = std::log(840.735) - 0.5 * sigma2;
    REQUIRE(sigma2 == Catch::Approx(0.5204).margin(5e-4));
    REQUIRE(mu == Catch::Approx(6.4741).margin(5e-4));
    REQUIRE(lm.quantile(0.5) == Catch::Approx(std::exp(mu)).margin(1e-9));
    REQUIRE(lm.quantile(0.5) == Catch::Approx(648.4).margin(0.5));

    // Resampled mean/sd must match the stored moments within MC error.
    RandomSource rng(5);
    const std::size_t n = 400000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = lm.sample(rng);
    REQUIRE(mean(xs) == Catch::Approx(840.735).epsilon(0.01));
    REQUIRE(sample_sd(xs) == Catch::Approx(694.613).epsilon(0.02));
  }
}

TEST_CASE("quantile is non-decreasing in u", "[marginals][property]") {
  RandomSource rng(17);
  std::vector<MarginalSpec> specs = {
      MarginalSpec::uniform01(), MarginalSpec::normal(-1.0, 2.5),
      MarginalSpec::lognormal_moments(3.0, 4.0),
      MarginalSpec::empirical({-2.0, -1.0, -1.0, 0.5, 3.0, 9.0})};
  for (const auto& spec : specs) {
    for (int k = 0; k < 2000; ++k) {
      double u1 = rng.uniform(), u2 = rng.uniform();
      if (u1 > u2) std::swap(u1, u2);
      REQUIRE(spec.quantile(u1) <= spec.quantile(u2));
    }
  }
}

TEST_CASE("domain and validation errors", "[marginals]") {
  auto u = MarginalSpec::uniform01();
  REQUIRE_THROWS_AS(u.quantile(0.0), config_error);
  REQUIRE_THROWS_AS(u.quantile(1.0), config_error);
  REQUIRE_THROWS_AS(u.quantile(-0.3), config_error);
  REQUIRE_THROWS_AS(MarginalSpec::empirical({3.0, 1.0, 2.0}), config_error);
  REQUIRE_THROWS_AS(MarginalSpec::empirical({1.0}), config_error);
  REQUIRE_THROWS_AS(MarginalSpec::normal(0.0, 0.0), config_error);
  REQUIRE_THROWS_AS(MarginalSpec::lognormal_moments(-1.0, 1.0), config_error);
}

TEST_CASE("sample-then-KS for every variant", "[marginals][property]") {
  std::vector<MarginalSpec> specs = {
      MarginalSpec::uniform01(), MarginalSpec::normal(2.0, 0.5),
      MarginalSpec::lognormal_moments(840.735, 694.613),
      MarginalSpec::empirical({0.0, 0.3, 0.35, 0.7, 0.72, 1.4, 2.0, 5.0})};
  int tag = 0;
  for (const auto& spec : specs) {
    RandomSource rng(1000 + tag++);
    std::vector<double> xs(10000);
    for (auto& x : xs) x = spec.sample(rng);
    double d = ks_statistic(xs, [&](double v) { return spec.cdf(v); });
    INFO("variant " << tag);
    REQUIRE(d < 0.02);
  }
}

TEST_CASE("samples file loader", "[marginals]") {
  const char* path = "ra_test_samples.csv";
  {
    std::ofstream out(path);
    out << "value\n1.5\n2.5\n-3.25\n";
  }
  auto xs = load_samples_file(path);
  REQUIRE(xs == std::vector<double>{1.5, 2.5, -3.25});
  std::remove(path);

  {
    std::ofstream out(path);
    out << "1.0\nnot_a_number\n";
  }
  REQUIRE_THROWS_AS(load_samples_file(path), config_error);
  std::remove(path);
}
