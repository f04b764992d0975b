#include "robustagg/marginals.hpp"

#include "robustagg/special_functions.hpp"
#include "robustagg/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace robustagg {

MarginalSpec MarginalSpec::uniform01() { return MarginalSpec{}; }

MarginalSpec MarginalSpec::normal(double mean, double sd) {
  require(sd > 0.0, "normal: sd must be positive");
  MarginalSpec m;
  m.kind_ = Kind::Normal;
  m.mean_ = mean;
  m.sd_ = sd;
  return m;
}

MarginalSpec MarginalSpec::lognormal_moments(double mean, double sd) {
  require(mean > 0.0, "lognormal_moments: mean must be positive");
  require(sd > 0.0, "lognormal_moments: sd must be positive");
  MarginalSpec m;
  m.kind_ = Kind::LogNormalMoments;
  m.mean_ = mean;
  m.sd_ = sd;
  double cv = sd / mean;
  m.log_sigma_ = std::sqrt(std::log1p(cv * cv));
  m.log_mu_ = std::log(mean) - 0.5 * m.log_sigma_ * m.log_sigma_;
  return m;
}

MarginalSpec MarginalSpec::empirical(std::vector<double> sorted_samples) {
  require(sorted_samples.size() >= 2, "empirical: need at least two samples");
  require(std::is_sorted(sorted_samples.begin(), sorted_samples.end()),
          "empirical: samples must be sorted");
  MarginalSpec m;
  m.kind_ = Kind::Empirical;
  m.samples_ = std::move(sorted_samples);
  double mu = 0.0;
  for (double x : m.samples_) mu += x;
  mu /= static_cast<double>(m.samples_.size());
  double ss = 0.0;
  for (double x : m.samples_) ss += (x - mu) * (x - mu);
  m.mean_ = mu;
  m.sd_ = std::sqrt(ss / static_cast<double>(m.samples_.size() - 1));
  return m;
}

double MarginalSpec::quantile(double u) const {
  require(u > 0.0 && u < 1.0, "quantile: u must lie in (0,1)");
  switch (kind_) {
    case Kind::Uniform01:
      return u;
    case Kind::Normal:
      return mean_ + sd_ * normal_quantile(u);
    case Kind::LogNormalMoments:
      return std::exp(log_mu_ + log_sigma_ * normal_quantile(u));
    case Kind::Empirical:
      return quantile_type7(samples_, u);
  }
  return u;
}

double MarginalSpec::cdf(double x) const {
  switch (kind_) {
    case Kind::Uniform01:
      return std::clamp(x, 0.0, 1.0);
    case Kind::Normal:
      return normal_cdf((x - mean_) / sd_);
    case Kind::LogNormalMoments:
      if (x <= 0.0) return 0.0;
      return normal_cdf((std::log(x) - log_mu_) / log_sigma_);
    case Kind::Empirical: {
      // Inverse of the type-7 quantile: linear between the order statistics,
      // with knot values k/(n-1).
      const auto& s = samples_;
      const double n1 = static_cast<double>(s.size() - 1);
      if (x <= s.front()) return 0.0;
      if (x >= s.back()) return 1.0;
      auto hi = std::upper_bound(s.begin(), s.end(), x);
      auto k = static_cast<std::size_t>(hi - s.begin());  // s[k-1] <= x < s[k]
      double lo_v = s[k - 1], hi_v = s[k];
      double frac = hi_v > lo_v ? (x - lo_v) / (hi_v - lo_v) : 1.0;
      return (static_cast<double>(k - 1) + frac) / n1;
    }
  }
  return 0.0;
}

double MarginalSpec::mean() const { return mean_; }

double MarginalSpec::sd() const { return sd_; }

double MarginalSpec::log_mu() const {
  if (kind_ != Kind::LogNormalMoments) throw std::logic_error("log_mu: not a lognormal law");
  return log_mu_;
}

double MarginalSpec::log_sigma() const {
  if (kind_ != Kind::LogNormalMoments) throw std::logic_error("log_sigma: not a lognormal law");
  return log_sigma_;
}

std::vector<double> load_samples_file(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open samples file: " + path);
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    // Tolerate a trailing comma / single-column CSV.
    if (!line.empty() && line.back() == ',') line.pop_back();
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      double v = std::stod(line, &pos);
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
      require(pos == line.size(), "trailing characters");
      out.push_back(v);
    } catch (const std::exception&) {
      if (first) {
        first = false;
        continue;  // header line
      }
      throw config_error("malformed number in samples file: " + path + ": '" + line + "'");
    }
    first = false;
  }
  require(!out.empty(), "samples file is empty: " + path);
  return out;
}

}  // namespace robustagg
