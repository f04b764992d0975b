#pragma once

#include "robustagg/reference_measure.hpp"

#include <string>
#include <vector>

namespace robustagg::oracles {

/// Reference values for acceptance testing: closed forms where available,
/// quadrature/Monte Carlo baselines otherwise.
struct OracleResult {
  enum class Kind { Exact, UpperBound, LowerBound, MonteCarlo };
  double value = 0.0;
  Kind kind = Kind::Exact;
  double stderr_estimate = 0.0;  // Monte Carlo only
  bool converged = true;         // rearrangement only
};

/// Expected maximum of two comonotone standard uniforms inside an l1 ball of
/// radius rho: (1 + min(rho, 1/2)) / 2.
OracleResult example1_value(double rho);

/// Upper bound for the robust AVaR of two independent uniforms:
///   min(1 + alpha, 2 - (2/3) sqrt(2 - 2 alpha) + rho / (2 (1 - alpha))).
OracleResult example2_upper(double alpha, double rho);

/// Matching chord lower bound, capped at 1 + alpha; the cap is reached at
/// rho* = alpha (1 - alpha) (1 - alpha/2).
OracleResult example2_lower(double alpha, double rho);

/// Rockafellar-Uryasev AVaR of the coordinate sum under the reference
/// measure, with a bootstrap standard error (200 resamples).
OracleResult avar_monte_carlo(const ReferenceMeasure& ref, double alpha, std::size_t n,
                              RandomSource& rng);

/// sup over couplings: sum of the marginal AVaRs by tail-quantile quadrature
/// on an n-point midpoint grid.
OracleResult comonotone_avar_sum(const ReferenceMeasure& ref, double alpha, std::size_t n);

/// Rearrangement estimate of the least AVaR of the sum over couplings of the
/// given marginals: flatten the full quantile matrix by oppositely ordering
/// each column against the sum of the others, then read off the empirical
/// tail average.
OracleResult rearrangement_lower_bound(const ReferenceMeasure& ref, double alpha,
                                       std::size_t grid_n, int max_iters);

/// Variance of the coordinate sum under the reference measure, from the
/// covariance specification (normal blocks under the independence coupling).
OracleResult variance_reference(const ReferenceMeasure& ref);

/// Internals exposed for tests: one rearrangement pass plus the tail-average
/// readout of a quantile matrix.
Matrix rearrangement_matrix(const ReferenceMeasure& ref, double alpha, std::size_t grid_n,
                            int max_iters, bool* converged);
double empirical_avar_of_sums(const Matrix& quantile_matrix, double alpha);

}  // namespace robustagg::oracles
