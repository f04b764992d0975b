#include <catch2/catch_amalgamated.hpp>

#include "robustagg/random.hpp"
#include "robustagg/stats.hpp"

#include <cmath>
#include <vector>

using robustagg::RandomSource;

TEST_CASE("identical seeds reproduce identical streams", "[random]") {
  RandomSource a(1234567), b(1234567);
  for (int i = 0; i < 1000; ++i) {
    REQUIRE(a.uniform() == b.uniform());
    REQUIRE(a.normal() == b.normal());
  }
  RandomSource c(1234567), d(1234568);
  bool all_equal = true;
  for (int i = 0; i < 50; ++i) all_equal = all_equal && (c.next_u64() == d.next_u64());
  REQUIRE_FALSE(all_equal);
}

TEST_CASE("substreams with distinct tags differ", "[random]") {
  RandomSource root(42);
  auto s1 = root.substream(1);
  auto s2 = root.substream(2);
  auto s1b = root.substream(1);
  REQUIRE(s1.uniform() == s1b.uniform());
  REQUIRE(s1.uniform() != s2.uniform());
  auto t1 = root.substream(1, 7);
  auto t2 = root.substream(1, 8);
  REQUIRE(t1.uniform() != t2.uniform());
}

TEST_CASE("uniform lies strictly inside (0,1)", "[random]") {
  RandomSource rng(9);
  for (int i = 0; i < 100000; ++i) {
    double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("normal and chi-squared moments", "[random]") {
  RandomSource rng(31);
  const std::size_t n = 200000;
  std::vector<double> zs(n), cs(n);
  for (auto& z : zs) z = rng.normal();
  for (auto& c : cs) c = rng.chi_squared(6.0);
  REQUIRE(robustagg::mean(zs) == Catch::Approx(0.0).margin(0.01));
  REQUIRE(robustagg::sample_sd(zs) == Catch::Approx(1.0).epsilon(0.01));
  REQUIRE(robustagg::mean(cs) == Catch::Approx(6.0).epsilon(0.01));
  REQUIRE(robustagg::sample_sd(cs) == Catch::Approx(std::sqrt(12.0)).epsilon(0.02));
}

TEST_CASE("fractional-dof chi-squared via gamma boost", "[random]") {
  RandomSource rng(77);
  const std::size_t n = 200000;
  std::vector<double> cs(n);
  for (auto& c : cs) c = rng.chi_squared(0.7);
  REQUIRE(robustagg::mean(cs) == Catch::Approx(0.7).epsilon(0.02));
}
