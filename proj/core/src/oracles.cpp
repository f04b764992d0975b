#include "robustagg/oracles.hpp"

#include "robustagg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robustagg::oracles {

OracleResult example1_value(double rho) {
  require(rho >= 0.0, "example1_value: rho must be nonnegative");
  return {(1.0 + std::min(rho, 0.5)) / 2.0, OracleResult::Kind::Exact, 0.0, true};
}

OracleResult example2_upper(double alpha, double rho) {
  require(alpha > 0.0 && alpha < 1.0, "example2: alpha must lie in (0,1)");
  require(rho >= 0.0, "example2: rho must be nonnegative");
  double base = 2.0 - (2.0 / 3.0) * std::sqrt(2.0 - 2.0 * alpha);
  double v = std::min(1.0 + alpha, base + rho / (2.0 * (1.0 - alpha)));
  return {v, OracleResult::Kind::UpperBound, 0.0, true};
}

OracleResult example2_lower(double alpha, double rho) {
  require(alpha > 0.0 && alpha < 1.0, "example2: alpha must lie in (0,1)");
  require(rho >= 0.0, "example2: rho must be nonnegative");
  double root = std::sqrt(2.0 - 2.0 * alpha);
  double base = 2.0 - (2.0 / 3.0) * root;
  double slope = 2.0 * (-3.0 + 2.0 * root + 3.0 * alpha) /
                 (3.0 * (2.0 - alpha) * (1.0 - alpha) * alpha);
  double v = std::min(1.0 + alpha, base + slope * rho);
  return {v, OracleResult::Kind::LowerBound, 0.0, true};
}

OracleResult avar_monte_carlo(const ReferenceMeasure& ref, double alpha, std::size_t n,
                              RandomSource& rng) {
  require(n >= 10000, "avar_monte_carlo: need at least 1e4 samples");
  require(alpha > 0.0 && alpha < 1.0, "avar_monte_carlo: alpha must lie in (0,1)");
  Matrix draws = ref.sample(n, rng);
  std::vector<double> sums(n);
  for (std::size_t i = 0; i < n; ++i) sums[i] = draws.row(static_cast<Eigen::Index>(i)).sum();

  auto rockafellar_uryasev = [alpha](std::vector<double>& s) {
    std::sort(s.begin(), s.end());
    double tau = quantile_type7(s, alpha);
    double tail = 0.0;
    for (double v : s) tail += std::max(v - tau, 0.0);
    return tau + tail / ((1.0 - alpha) * static_cast<double>(s.size()));
  };

  std::vector<double> work = sums;
  double value = rockafellar_uryasev(work);

  const int n_boot = 200;
  std::vector<double> boot(n_boot);
  auto boot_rng = rng.substream(0xB007);
  std::vector<double> resample(n);
  for (int b = 0; b < n_boot; ++b) {
    for (std::size_t i = 0; i < n; ++i) resample[i] = sums[boot_rng.index(n)];
    boot[static_cast<std::size_t>(b)] = rockafellar_uryasev(resample);
  }
  return {value, OracleResult::Kind::MonteCarlo, sample_sd(boot), true};
}

OracleResult comonotone_avar_sum(const ReferenceMeasure& ref, double alpha, std::size_t n) {
  require(alpha > 0.0 && alpha < 1.0, "comonotone_avar_sum: alpha must lie in (0,1)");
  require(n >= 16, "comonotone_avar_sum: grid too small");
  double total = 0.0;
  for (int c = 0; c < ref.dim(); ++c) {
    double term = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      double u = alpha + (1.0 - alpha) * (static_cast<double>(k) + 0.5) / static_cast<double>(n);
      term += ref.coordinate_quantile(c, u);
    }
    total += term / static_cast<double>(n);
  }
  return {total, OracleResult::Kind::Exact, 0.0, true};
}

double empirical_avar_of_sums(const Matrix& quantile_matrix, double alpha) {
  const auto n = quantile_matrix.rows();
  std::vector<double> sums(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) sums[static_cast<std::size_t>(k)] = quantile_matrix.row(k).sum();
  std::sort(sums.begin(), sums.end());
  double w = (1.0 - alpha) * static_cast<double>(n);
  auto full = static_cast<std::size_t>(w);
  double acc = 0.0;
  for (std::size_t k = 0; k < full; ++k) acc += sums[sums.size() - 1 - k];
  double frac = w - static_cast<double>(full);
  if (frac > 0.0 && full < sums.size()) acc += frac * sums[sums.size() - 1 - full];
  return acc / w;
}

Matrix rearrangement_matrix(const ReferenceMeasure& ref, double alpha, std::size_t grid_n,
                            int max_iters, bool* converged) {
  (void)alpha;
  const int d = ref.dim();
  const auto n = static_cast<Eigen::Index>(grid_n);
  Matrix q(n, d);
  for (int c = 0; c < d; ++c)
    for (Eigen::Index k = 0; k < n; ++k)
      q(k, c) = ref.coordinate_quantile(
          c, (static_cast<double>(k) + 0.5) / static_cast<double>(grid_n));
  if (d == 1) {
    if (converged) *converged = true;
    return q;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::vector<double> col_sorted(static_cast<std::size_t>(n));
  bool done = false;
  for (int pass = 0; pass < max_iters && !done; ++pass) {
    done = true;
    for (int c = 0; c < d; ++c) {
      Vector others = q.rowwise().sum() - q.col(c);
      std::iota(order.begin(), order.end(), 0);
      // rows sorted by the sum of the other columns, ties by row index
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) { return others(a) < others(b); });
      for (Eigen::Index k = 0; k < n; ++k) col_sorted[static_cast<std::size_t>(k)] = q(k, c);
      std::sort(col_sorted.begin(), col_sorted.end(), std::greater<double>());
      for (Eigen::Index k = 0; k < n; ++k) {
        double v = col_sorted[static_cast<std::size_t>(k)];
        if (q(order[static_cast<std::size_t>(k)], c) != v) {
          q(order[static_cast<std::size_t>(k)], c) = v;
          done = false;
        }
      }
    }
  }
  if (converged) *converged = done;
  return q;
}

OracleResult rearrangement_lower_bound(const ReferenceMeasure& ref, double alpha,
                                       std::size_t grid_n, int max_iters) {
  require(alpha > 0.0 && alpha < 1.0, "rearrangement: alpha must lie in (0,1)");
  require(grid_n >= 32, "rearrangement: grid_n must be at least 32");
  require(max_iters >= 1, "rearrangement: max_iters must be positive");
  bool converged = false;
  Matrix q = rearrangement_matrix(ref, alpha, grid_n, max_iters, &converged);
  return {empirical_avar_of_sums(q, alpha), OracleResult::Kind::LowerBound, 0.0, converged};
}

OracleResult variance_reference(const ReferenceMeasure& ref) {
  if (ref.copula().kind() != Copula::Kind::Independence && ref.blocks().size() > 1)
    throw unsupported_instance(
        "variance_reference: closed form requires independently coupled blocks");
  double var = 0.0;
  for (const auto& b : ref.blocks()) {
    switch (b.kind()) {
      case MarginalBlock::Kind::JointNormal:
        var += b.covariance().sum();
        break;
      case MarginalBlock::Kind::ProductOfUnivariates:
        for (const auto& law : b.univariate_laws()) var += law.sd() * law.sd();
        break;
      case MarginalBlock::Kind::EmpiricalJoint:
        throw unsupported_instance("variance_reference: empirical joint blocks not supported");
    }
  }
  return {var, OracleResult::Kind::Exact, 0.0, true};
}

}  // namespace robustagg::oracles
