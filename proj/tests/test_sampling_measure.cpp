#include <catch2/catch_amalgamated.hpp>

#include "robustagg/sampling_measure.hpp"
#include "robustagg/stats.hpp"

using namespace robustagg;

namespace {

ReferenceMeasure comonotone_uniform_pair() {
  std::vector<MarginalBlock> blocks;
  blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::uniform01()}));
  blocks.push_back(MarginalBlock::product({1}, {MarginalSpec::uniform01()}));
  return {std::move(blocks), Copula::comonotone()};
}

}  // namespace

TEST_CASE("theta prod keeps x on the diagonal and fills the square in y", "[theta]") {
  auto ref = comonotone_uniform_pair();
  RandomSource rng(11);
  auto batch = sample_theta(SamplingMeasureSpec::prod(), ref, 50000, rng);
  for (Eigen::Index i = 0; i < 200; ++i) REQUIRE(batch.x(i, 0) == batch.x(i, 1));
  std::vector<double> y0(batch.y.col(0).data(), batch.y.col(0).data() + batch.y.rows());
  std::vector<double> y1(batch.y.col(1).data(), batch.y.col(1).data() + batch.y.rows());
  REQUIRE(pearson_correlation(y0, y1) == Catch::Approx(0.0).margin(0.02));
}

TEST_CASE("theta half mixes diagonal and product with weight one half", "[theta]") {
  auto ref = comonotone_uniform_pair();
  RandomSource rng(12);
  const std::size_t n = 100000;
  auto batch = sample_theta(SamplingMeasureSpec::half(), ref, n, rng);
  std::size_t diag = 0;
  for (Eigen::Index i = 0; i < batch.x.rows(); ++i)
    if (batch.x.row(i) == batch.y.row(i)) ++diag;
  REQUIRE(static_cast<double>(diag) / static_cast<double>(n) == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("theta third mixes half/quarter/quarter with tight noise", "[theta]") {
  // Wide marginals keep the product component away from the diagonal, so the
  // exact/near-diagonal fractions isolate the mixture weights.
  std::vector<MarginalBlock> blocks;
  blocks.push_back(MarginalBlock::product({0}, {MarginalSpec::normal(0.0, 10.0)}));
  blocks.push_back(MarginalBlock::product({1}, {MarginalSpec::normal(0.0, 10.0)}));
  ReferenceMeasure ref(std::move(blocks), Copula::independence());
  RandomSource rng(13);
  const std::size_t n = 100000;
  const double eps = 0.05;
  auto batch = sample_theta(SamplingMeasureSpec::third(Vector::Constant(2, eps)), ref, n, rng);
  std::size_t exact = 0, near = 0;
  for (Eigen::Index i = 0; i < batch.x.rows(); ++i) {
    double dinf = (batch.x.row(i) - batch.y.row(i)).cwiseAbs().maxCoeff();
    if (dinf == 0.0)
      ++exact;
    else if (dinf < 4.0 * eps)
      ++near;
  }
  REQUIRE(static_cast<double>(exact) / static_cast<double>(n) == Catch::Approx(0.25).margin(0.01));
  REQUIRE(static_cast<double>(near) / static_cast<double>(n) == Catch::Approx(0.25).margin(0.012));
}

TEST_CASE("third noise defaults to five percent of the marginal sd", "[theta]") {
  auto ref = comonotone_uniform_pair();
  Vector eps = resolve_epsilon(SamplingMeasureSpec::third(), ref);
  REQUIRE(eps.size() == 2);
  REQUIRE(eps(0) == Catch::Approx(0.05 * std::sqrt(1.0 / 12.0)).margin(1e-12));

  REQUIRE_THROWS_AS(
      resolve_epsilon(SamplingMeasureSpec::third(Vector::Constant(3, 0.1)), ref),
      config_error);
  REQUIRE_THROWS_AS(
      resolve_epsilon(SamplingMeasureSpec::third(Vector::Constant(2, -0.1)), ref),
      config_error);
}
