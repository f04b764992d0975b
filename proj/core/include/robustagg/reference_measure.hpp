#pragma once

#include "robustagg/common.hpp"
#include "robustagg/marginals.hpp"
#include "robustagg/random.hpp"

#include <vector>

namespace robustagg {

/// A fixed (possibly multivariate) marginal: the law of one block of
/// coordinates that every feasible measure must reproduce exactly.
class MarginalBlock {
 public:
  enum class Kind { ProductOfUnivariates, JointNormal, EmpiricalJoint };

  static MarginalBlock product(std::vector<int> coordinates, std::vector<MarginalSpec> laws);
  static MarginalBlock joint_normal(std::vector<int> coordinates, Vector mean, Matrix covariance);
  /// Rows of `points` are draws from the block law.
  static MarginalBlock empirical_joint(std::vector<int> coordinates, Matrix points);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(coordinates_.size()); }
  const std::vector<int>& coordinates() const { return coordinates_; }

  /// One draw from the block law written into out (length dim()).
  void sample_into(Eigen::Ref<Vector> out, RandomSource& rng) const;

  /// Quantile of a one-dimensional block.
  double quantile1d(double u) const;
  /// Cdf of a one-dimensional block (used by feasibility diagnostics).
  double cdf1d(double x) const;
  /// Marginal cdf / quantile of the block's k-th coordinate.
  double coordinate_cdf(int k, double x) const;
  double coordinate_quantile(int k, double u) const;
  /// Analytic/pilot sd of each coordinate (noise-scale defaults).
  Vector coordinate_sds() const;

  const std::vector<MarginalSpec>& univariate_laws() const { return laws_; }
  const Vector& mean() const { return mean_; }
  const Matrix& covariance() const { return cov_; }

 private:
  MarginalBlock() = default;
  Kind kind_ = Kind::ProductOfUnivariates;
  std::vector<int> coordinates_;
  std::vector<MarginalSpec> laws_;
  Vector mean_;
  Matrix cov_;
  Matrix cov_factor_;  // A with A A^T = cov (eigen factor; tolerates singular psd)
  Matrix points_;
};

/// The coupling of the blocks of a reference measure.
class Copula {
 public:
  enum class Kind { Comonotone, Independence, Gaussian, StudentT, ExplicitJointSamples };

  static Copula comonotone();
  static Copula independence();
  static Copula gaussian(Matrix correlation);
  static Copula student_t(double dof, Matrix correlation);
  /// Full joint draws (rows) replacing any parametric coupling.
  static Copula explicit_joint(Matrix points);

  Kind kind() const { return kind_; }
  double dof() const { return dof_; }
  const Matrix& correlation() const { return corr_; }
  const Matrix& cholesky() const { return chol_; }
  const Matrix& points() const { return points_; }

 private:
  Copula() = default;
  Kind kind_ = Kind::Independence;
  double dof_ = 0.0;
  Matrix corr_;
  Matrix chol_;
  Matrix points_;
};

/// Reference measure mu-bar: marginal blocks coupled by a copula. Immutable
/// after construction and safe to share across threads; sampling threads
/// must hold their own RandomSource.
class ReferenceMeasure {
 public:
  ReferenceMeasure(std::vector<MarginalBlock> blocks, Copula copula);

  int dim() const { return dim_; }
  const std::vector<MarginalBlock>& blocks() const { return blocks_; }
  const Copula& copula() const { return copula_; }

  /// n i.i.d. draws from mu-bar, one row per draw.
  Matrix sample(std::size_t n, RandomSource& rng) const;

  /// n draws with each block sampled independently from its own law: the
  /// product of the block marginals (the y-law of theta-prod).
  Matrix sample_product_of_blocks(std::size_t n, RandomSource& rng) const;

  /// Per-coordinate marginal sds (pilot-based for blocks without closed form).
  Vector coordinate_sds() const;

  /// Marginal cdf / quantile of a global coordinate.
  double coordinate_cdf(int coordinate, double x) const;
  double coordinate_quantile(int coordinate, double u) const;

  /// Block owning each global coordinate, as (block index, offset in block).
  std::pair<int, int> locate(int coordinate) const;

 private:
  void sample_row(Eigen::Ref<Vector> row, RandomSource& rng) const;

  std::vector<MarginalBlock> blocks_;
  Copula copula_;
  int dim_ = 0;
  std::vector<std::pair<int, int>> coordinate_map_;
};

}  // namespace robustagg
