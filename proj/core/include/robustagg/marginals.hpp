#pragma once

#include "robustagg/common.hpp"
#include "robustagg/random.hpp"

#include <string>
#include <vector>

namespace robustagg {

/// A fixed univariate marginal law with quantile, cdf and moment access.
///
/// Empirical laws resample through the type-7 linearly interpolated quantile
/// of the sorted data, so their cdf here is the piecewise-linear inverse of
/// that quantile rather than the step ecdf: it is the distribution actually
/// produced when sampling.
class MarginalSpec {
 public:
  enum class Kind { Uniform01, Normal, LogNormalMoments, Empirical };

  static MarginalSpec uniform01();
  static MarginalSpec normal(double mean, double sd);
  /// Lognormal parameterized by the mean/sd of the variable itself.
  /// Log-scale parameters follow by exact moment matching:
  ///   sigma^2 = ln(1 + (sd/mean)^2),  mu = ln(mean) - sigma^2/2.
  static MarginalSpec lognormal_moments(double mean, double sd);
  /// Sorted sample of size >= 2; unsorted input is rejected.
  static MarginalSpec empirical(std::vector<double> sorted_samples);

  Kind kind() const { return kind_; }

  /// F^{-1}(u) for u in (0,1); non-decreasing in u.
  double quantile(double u) const;
  double cdf(double x) const;
  double sample(RandomSource& rng) const { return quantile(rng.uniform()); }

  double mean() const;
  double sd() const;

  /// Log-scale parameters of a lognormal_moments law.
  double log_mu() const;
  double log_sigma() const;
  const std::vector<double>& samples() const { return samples_; }

 private:
  MarginalSpec() = default;
  Kind kind_ = Kind::Uniform01;
  double mean_ = 0.5;
  double sd_ = 0.28867513459481288;  // sqrt(1/12)
  double log_mu_ = 0.0;
  double log_sigma_ = 1.0;
  std::vector<double> samples_;
};

/// One column of floats, optionally preceded by a non-numeric header line.
/// Accepts newline- or comma-separated single-column CSV.
std::vector<double> load_samples_file(const std::string& path);

}  // namespace robustagg
