#pragma once

// DNB-style six-risk reference measure used by tests: three lognormal
// stand-ins matching the published standard deviations of the empirical
// credit/market/asset risks (means are not published; we take mean =
// 1.25 * sd), the three published lognormal risks, and the student-t(6)
// copula with its correlation matrix.

#include "robustagg/reference_measure.hpp"

#include <vector>

namespace dnb {

inline std::vector<double> marginal_sds() {
  return {644.602, 5562.362, 1112.402, 694.613, 465.064, 111.011};
}

inline std::vector<double> marginal_means() {
  return {1.25 * 644.602, 1.25 * 5562.362, 1.25 * 1112.402, 840.735, 743.345, 438.978};
}

inline robustagg::Matrix correlation() {
  robustagg::Matrix s(6, 6);
  s << 1.00, 0.36, 0.35, 0.44, 0.45, 0.30,
       0.36, 1.00, 0.37, 0.36, 0.41, 0.43,
       0.35, 0.37, 1.00, 0.44, 0.32, 0.42,
       0.44, 0.36, 0.44, 1.00, 0.41, 0.29,
       0.45, 0.41, 0.32, 0.41, 1.00, 0.28,
       0.30, 0.43, 0.42, 0.29, 0.28, 1.00;
  return s;
}

inline std::vector<robustagg::MarginalSpec> lognormal_marginals() {
  auto ms = marginal_means();
  auto sds = marginal_sds();
  std::vector<robustagg::MarginalSpec> out;
  for (std::size_t i = 0; i < 6; ++i)
    out.push_back(robustagg::MarginalSpec::lognormal_moments(ms[i], sds[i]));
  return out;
}

inline robustagg::ReferenceMeasure reference_measure() {
  std::vector<robustagg::MarginalBlock> blocks;
  auto laws = lognormal_marginals();
  for (int i = 0; i < 6; ++i)
    blocks.push_back(robustagg::MarginalBlock::product({i}, {laws[static_cast<std::size_t>(i)]}));
  return {std::move(blocks), robustagg::Copula::student_t(6.0, correlation())};
}

}  // namespace dnb
