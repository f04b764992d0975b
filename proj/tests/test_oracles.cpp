#include <catch2/catch_amalgamated.hpp>

#include "robustagg/oracles.hpp"
#include "robustagg/stats.hpp"

#include <cmath>

using namespace robustagg;
using namespace robustagg::oracles;

namespace {

ReferenceMeasure uniform_pair(Copula copula) {
  std::vector<MarginalBlock> blocks;
  blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::uniform01()}));
  blocks.push_back(MarginalBlock::product({1}, {MarginalSpec::uniform01()}));
  return {std::move(blocks), std::move(copula)};
}

// Independent oracle for the AVaR of the sum of two independent uniforms:
// the triangular-density closed form q + (2-q)^3 / (6 (1-alpha)) with
// q = 2 - sqrt(2 (1-alpha)).
double independent_uniform_avar(double alpha) {
  double q = 2.0 - std::sqrt(2.0 * (1.0 - alpha));
  return q + std::pow(2.0 - q, 3.0) / (6.0 * (1.0 - alpha));
}

}  // namespace

TEST_CASE("example 1 closed form", "[oracles]") {
  REQUIRE(example1_value(0.0).value == Catch::Approx(0.5));
  REQUIRE(example1_value(0.25).value == Catch::Approx(0.625));
  REQUIRE(example1_value(1.0).value == Catch::Approx(0.75));
}

TEST_CASE("example 1 value is concave piecewise linear with a kink at 1/2", "[oracles][property]") {
  double prev = -1.0;
  double prev_slope = 1e9;
  double last = 0.0;
  for (int k = 0; k <= 40; ++k) {
    double rho = 0.025 * k;
    double v = example1_value(rho).value;
    REQUIRE(v >= prev - 1e-12);
    if (k > 0) {
      double slope = (v - last) / 0.025;
      REQUIRE(slope <= prev_slope + 1e-12);
      prev_slope = slope;
    }
    last = v;
    prev = v;
  }
  REQUIRE(example1_value(0.499).value < example1_value(0.5).value);
  REQUIRE(example1_value(0.5).value == example1_value(0.7).value);
}

TEST_CASE("example 2 bounds at the tabled points", "[oracles]") {
  REQUIRE(example2_upper(0.7, 0.0).value == Catch::Approx(1.48360).margin(1e-5));
  REQUIRE(example2_lower(0.7, 0.0).value == Catch::Approx(1.48360).margin(1e-5));
  REQUIRE(example2_upper(0.7, 0.0).value ==
          Catch::Approx(independent_uniform_avar(0.7)).margin(1e-12));
  REQUIRE(example2_upper(0.7, 0.06).value == Catch::Approx(1.58360).margin(1e-5));
  REQUIRE(example2_upper(0.7, 1.0).value == Catch::Approx(1.7));
  // the chord reaches the cap exactly at rho* = alpha (1-alpha)(1-alpha/2)
  double rho_star = 0.7 * 0.3 * 0.65;
  REQUIRE(example2_lower(0.7, rho_star).value == Catch::Approx(1.7).margin(1e-12));
  REQUIRE(example2_lower(0.7, rho_star - 1e-6).value < 1.7);
}

TEST_CASE("bound sandwich over alpha and rho grids", "[oracles][property]") {
  for (double alpha : {0.5, 0.7, 0.9}) {
    double prev_lo = -1e300, prev_hi = -1e300;
    for (int k = 0; k < 20; ++k) {
      double rho = 0.02 * k;
      double lo = example2_lower(alpha, rho).value;
      double hi = example2_upper(alpha, rho).value;
      REQUIRE(lo <= hi + 1e-12);
      REQUIRE(lo >= prev_lo - 1e-12);
      REQUIRE(hi >= prev_hi - 1e-12);
      REQUIRE(hi <= 1.0 + alpha + 1e-12);
      prev_lo = lo;
      prev_hi = hi;
    }
  }
}

TEST_CASE("avar monte carlo baselines", "[oracles]") {
  RandomSource rng(31);
  auto indep = uniform_pair(Copula::independence());
  auto r1 = avar_monte_carlo(indep, 0.7, 200000, rng);
  REQUIRE(r1.value ==
          Catch::Approx(independent_uniform_avar(0.7)).margin(5.0 * r1.stderr_estimate + 5e-3));
  REQUIRE(r1.stderr_estimate > 0.0);
  REQUIRE(r1.stderr_estimate < 0.01);

  auto comon = uniform_pair(Copula::comonotone());
  auto r2 = avar_monte_carlo(comon, 0.7, 100000, rng);
  REQUIRE(r2.value == Catch::Approx(1.7).margin(5.0 * r2.stderr_estimate + 5e-3));

  // degenerate point mass: AVaR equals the point
  std::vector<MarginalBlock> blocks;
  blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::empirical({4.25, 4.25})}));
  ReferenceMeasure point(std::move(blocks), Copula::independence());
  auto r3 = avar_monte_carlo(point, 0.7, 10000, rng);
  REQUIRE(r3.value == Catch::Approx(4.25).margin(1e-12));
  REQUIRE(r3.stderr_estimate == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("avar monte carlo is translation equivariant", "[oracles][property]") {
  RandomSource a(77), b(77);
  auto base = uniform_pair(Copula::independence());
  std::vector<MarginalBlock> blocks;
  blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::normal(3.0, 1e-12)}));
  (void)blocks;
  // shifted uniforms via empirical two-point interpolation would change the
  // law; instead compare uniforms against uniforms + constant through the
  // normal representation U + k ~ quantile shift
  const double k = 2.5;
  std::vector<MarginalBlock> shifted;
  shifted.push_back(MarginalBlock::product(
      {0}, {MarginalSpec::empirical({k + 0.0, k + 0.5, k + 1.0})}));
  shifted.push_back(MarginalBlock::product(
      {1}, {MarginalSpec::empirical({k + 0.0, k + 0.5, k + 1.0})}));
  std::vector<MarginalBlock> plain;
  plain.push_back(MarginalBlock::product({0}, {MarginalSpec::empirical({0.0, 0.5, 1.0})}));
  plain.push_back(MarginalBlock::product({1}, {MarginalSpec::empirical({0.0, 0.5, 1.0})}));
  ReferenceMeasure ref_shift(std::move(shifted), Copula::independence());
  ReferenceMeasure ref_plain(std::move(plain), Copula::independence());
  auto rs = avar_monte_carlo(ref_shift, 0.7, 50000, a);
  auto rp = avar_monte_carlo(ref_plain, 0.7, 50000, b);
  REQUIRE(rs.value == Catch::Approx(rp.value + 2.0 * k).margin(1e-9));
}

TEST_CASE("comonotone avar sum", "[oracles]") {
  auto pair = uniform_pair(Copula::independence());
  REQUIRE(comonotone_avar_sum(pair, 0.7, 100000).value == Catch::Approx(1.7).margin(1e-6));

  std::vector<MarginalBlock> blocks;
  blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::normal(0.0, 1.0)}));
  ReferenceMeasure gauss(std::move(blocks), Copula::independence());
  // Gaussian AVaR closed form: pdf(z_alpha) / (1 - alpha)
  double z = 1.6448536269514722;
  double closed = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI) / 0.05;
  REQUIRE(closed == Catch::Approx(2.0627).margin(1e-4));
  REQUIRE(comonotone_avar_sum(gauss, 0.95, 200000).value == Catch::Approx(closed).margin(2e-3));

  SECTION("homogeneity: scaling one marginal scales its term") {
    std::vector<MarginalBlock> b1, b2;
    b1.push_back(MarginalBlock::product({0}, {MarginalSpec::lognormal_moments(2.0, 1.0)}));
    b2.push_back(MarginalBlock::product({0}, {MarginalSpec::lognormal_moments(6.0, 3.0)}));
    ReferenceMeasure r1(std::move(b1), Copula::independence());
    ReferenceMeasure r2(std::move(b2), Copula::independence());
    double t1 = comonotone_avar_sum(r1, 0.9, 50000).value;
    double t2 = comonotone_avar_sum(r2, 0.9, 50000).value;
    REQUIRE(t2 == Catch::Approx(3.0 * t1).epsilon(1e-9));
  }
}

TEST_CASE("rearrangement estimate", "[oracles]") {
  SECTION("one dimension needs no rearranging") {
    std::vector<MarginalBlock> blocks;
    blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::uniform01()}));
    ReferenceMeasure ref(std::move(blocks), Copula::independence());
    auto r = rearrangement_lower_bound(ref, 0.7, 2000, 20);
    REQUIRE(r.value == Catch::Approx(0.85).margin(1e-3));
    REQUIRE(r.converged);
  }

  SECTION("two uniforms mix to a constant sum") {
    auto ref = uniform_pair(Copula::independence());
    auto r = rearrangement_lower_bound(ref, 0.7, 512, 50);
    REQUIRE(r.converged);
    REQUIRE(r.value <= 1.4836);
    REQUIRE(r.value == Catch::Approx(1.0).margin(1e-6));
  }

}

TEST_CASE("rearrangement is a fixed point after convergence", "[oracles][property]") {
  std::vector<MarginalBlock> blocks;
  blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::lognormal_moments(2.0, 1.5)}));
  blocks.push_back(MarginalBlock::product({1}, {MarginalSpec::uniform01()}));
  blocks.push_back(MarginalBlock::product({2}, {MarginalSpec::normal(1.0, 2.0)}));
  ReferenceMeasure ref(std::move(blocks), Copula::independence());
  bool conv1 = false, conv2 = false;
  Matrix m1 = rearrangement_matrix(ref, 0.9, 256, 200, &conv1);
  REQUIRE(conv1);
  // one extra pass over the converged matrix must change nothing; compare
  // through the public entry by re-running with the same grid
  Matrix m2 = rearrangement_matrix(ref, 0.9, 256, 201, &conv2);
  REQUIRE(conv2);
  REQUIRE(m1 == m2);
}

TEST_CASE("variance reference", "[oracles]") {
  auto make = [](double corr) {
    Matrix cov(2, 2);
    cov << 1.0, corr, corr, 1.0;
    std::vector<MarginalBlock> blocks;
    blocks.push_back(MarginalBlock::joint_normal({0, 1}, Vector::Zero(2), cov));
    blocks.push_back(MarginalBlock::product({2}, {MarginalSpec::normal(0.0, 1.0)}));
    return ReferenceMeasure(std::move(blocks), Copula::independence());
  };
  REQUIRE(variance_reference(make(0.8)).value == Catch::Approx(4.6).margin(1e-12));
  REQUIRE(variance_reference(make(0.0)).value == Catch::Approx(3.0).margin(1e-12));
  REQUIRE(variance_reference(make(1.0)).value == Catch::Approx(5.0).margin(1e-12));
  REQUIRE(variance_reference(make(-1.0)).value == Catch::Approx(1.0).margin(1e-12));

  SECTION("monte carlo cross-check of the corr 0.8 instance") {
    RandomSource rng(5);
    Matrix s = make(0.8).sample(1000000, rng);
    std::vector<double> sums(static_cast<std::size_t>(s.rows()));
    for (Eigen::Index i = 0; i < s.rows(); ++i) sums[static_cast<std::size_t>(i)] = s.row(i).sum();
    double m = mean(sums);
    double var = 0.0;
    for (double v : sums) var += (v - m) * (v - m);
    var /= static_cast<double>(sums.size() - 1);
    REQUIRE(var == Catch::Approx(4.6).epsilon(0.01));
  }
}
