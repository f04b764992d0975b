#pragma once

#include "robustagg/random.hpp"

#include <functional>
#include <vector>

namespace robustagg {

/// Type-7 (linear interpolation) quantile of sorted data, u in (0,1).
double quantile_type7(const std::vector<double>& sorted, double u);

/// One-sample Kolmogorov-Smirnov statistic of the data against cdf.
/// Data need not be sorted.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

double mean(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);
double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

/// Multinomial resampling of a weighted cloud into n equal-weight indices.
std::vector<std::size_t> resample_indices(const std::vector<double>& weights, std::size_t n,
                                          RandomSource& rng);

}  // namespace robustagg
