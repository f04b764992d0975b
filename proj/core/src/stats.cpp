#include "robustagg/stats.hpp"

#include "robustagg/common.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace robustagg {

double quantile_type7(const std::vector<double>& sorted, double u) {
  require(!sorted.empty(), "quantile: empty sample");
  require(u > 0.0 && u < 1.0, "quantile: u must lie in (0,1)");
  if (sorted.size() == 1) return sorted[0];
  double h = u * static_cast<double>(sorted.size() - 1);
  auto i = static_cast<std::size_t>(h);
  if (i >= sorted.size() - 1) return sorted.back();
  double frac = h - static_cast<double>(i);
  return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
}

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
  require(!samples.empty(), "ks_statistic: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double f = cdf(samples[i]);
    d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

double mean(const std::vector<double>& xs) {
  require(!xs.empty(), "mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
  require(xs.size() >= 2, "sample_sd: need at least two points");
  double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double pearson_correlation(const std::vector<double>& xs, const std::vector<double>& ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "correlation: size mismatch");
  double mx = mean(xs), my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

std::vector<std::size_t> resample_indices(const std::vector<double>& weights, std::size_t n,
                                          RandomSource& rng) {
  require(!weights.empty(), "resample: empty weights");
  std::vector<double> cum(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    require(weights[i] >= 0.0, "resample: negative weight");
    total += weights[i];
    cum[i] = total;
  }
  require(total > 0.0, "resample: all weights zero");
  std::vector<std::size_t> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double u = rng.uniform() * total;
    out[k] = static_cast<std::size_t>(
        std::lower_bound(cum.begin(), cum.end(), u) - cum.begin());
  }
  return out;
}

}  // namespace robustagg
