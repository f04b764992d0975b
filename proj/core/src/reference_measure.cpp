#include "robustagg/reference_measure.hpp"

#include "robustagg/special_functions.hpp"
#include "robustagg/stats.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

namespace robustagg {

namespace {

// Factor A with A A^T = S for symmetric positive semidefinite S. Eigen-based,
// so exactly singular covariances (perfect correlation) are accepted.
Matrix psd_factor(const Matrix& s, const char* what) {
  require(s.rows() == s.cols(), std::string(what) + ": matrix must be square");
  require(s.isApprox(s.transpose(), 1e-10), std::string(what) + ": matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(s);
  require(es.info() == Eigen::Success, std::string(what) + ": eigendecomposition failed");
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  require(es.eigenvalues().minCoeff() > -1e-10 * scale,
          std::string(what) + ": matrix is not positive semidefinite");
  Vector sqrt_ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * sqrt_ev.asDiagonal();
}

// Correlation matrices go through plain Cholesky; failure is the
// validation error for non-psd input.
Matrix correlation_cholesky(const Matrix& corr) {
  require(corr.rows() == corr.cols(), "correlation matrix must be square");
  require(corr.isApprox(corr.transpose(), 1e-10), "correlation matrix must be symmetric");
  for (Eigen::Index i = 0; i < corr.rows(); ++i)
    require(std::fabs(corr(i, i) - 1.0) < 1e-12, "correlation matrix must have unit diagonal");
  Eigen::LLT<Matrix> llt(corr);
  require(llt.info() == Eigen::Success,
          "correlation matrix is not positive definite (Cholesky failure)");
  return llt.matrixL();
}

}  // namespace

MarginalBlock MarginalBlock::product(std::vector<int> coordinates, std::vector<MarginalSpec> laws) {
  require(!coordinates.empty(), "block: empty coordinate list");
  require(coordinates.size() == laws.size(), "block: one law per coordinate required");
  MarginalBlock b;
  b.kind_ = Kind::ProductOfUnivariates;
  b.coordinates_ = std::move(coordinates);
  b.laws_ = std::move(laws);
  return b;
}

MarginalBlock MarginalBlock::joint_normal(std::vector<int> coordinates, Vector mean,
                                          Matrix covariance) {
  require(!coordinates.empty(), "block: empty coordinate list");
  auto d = static_cast<Eigen::Index>(coordinates.size());
  require(mean.size() == d && covariance.rows() == d && covariance.cols() == d,
          "joint_normal: dimension mismatch");
  MarginalBlock b;
  b.kind_ = Kind::JointNormal;
  b.coordinates_ = std::move(coordinates);
  b.mean_ = std::move(mean);
  b.cov_factor_ = psd_factor(covariance, "joint_normal covariance");
  b.cov_ = std::move(covariance);
  return b;
}

MarginalBlock MarginalBlock::empirical_joint(std::vector<int> coordinates, Matrix points) {
  require(!coordinates.empty(), "block: empty coordinate list");
  require(points.rows() >= 2, "empirical_joint: need at least two points");
  require(points.cols() == static_cast<Eigen::Index>(coordinates.size()),
          "empirical_joint: dimension mismatch");
  MarginalBlock b;
  b.kind_ = Kind::EmpiricalJoint;
  b.coordinates_ = std::move(coordinates);
  b.points_ = std::move(points);
  return b;
}

void MarginalBlock::sample_into(Eigen::Ref<Vector> out, RandomSource& rng) const {
  switch (kind_) {
    case Kind::ProductOfUnivariates:
      for (int i = 0; i < dim(); ++i) out(i) = laws_[static_cast<std::size_t>(i)].sample(rng);
      return;
    case Kind::JointNormal: {
      Vector z(dim());
      for (int i = 0; i < dim(); ++i) z(i) = rng.normal();
      out = mean_ + cov_factor_ * z;
      return;
    }
    case Kind::EmpiricalJoint: {
      auto row = rng.index(static_cast<std::size_t>(points_.rows()));
      out = points_.row(static_cast<Eigen::Index>(row)).transpose();
      return;
    }
  }
}

double MarginalBlock::quantile1d(double u) const {
  require(dim() == 1, "quantile1d: block is not one-dimensional");
  switch (kind_) {
    case Kind::ProductOfUnivariates:
      return laws_[0].quantile(u);
    case Kind::JointNormal:
      return mean_(0) + std::sqrt(cov_(0, 0)) * normal_quantile(u);
    case Kind::EmpiricalJoint: {
      std::vector<double> s(points_.data(), points_.data() + points_.rows());
      std::sort(s.begin(), s.end());
      return quantile_type7(s, u);
    }
  }
  return u;
}

double MarginalBlock::cdf1d(double x) const {
  require(dim() == 1, "cdf1d: block is not one-dimensional");
  switch (kind_) {
    case Kind::ProductOfUnivariates:
      return laws_[0].cdf(x);
    case Kind::JointNormal:
      return normal_cdf((x - mean_(0)) / std::sqrt(cov_(0, 0)));
    case Kind::EmpiricalJoint: {
      std::vector<double> s(points_.data(), points_.data() + points_.rows());
      std::sort(s.begin(), s.end());
      return MarginalSpec::empirical(std::move(s)).cdf(x);
    }
  }
  return 0.0;
}

double MarginalBlock::coordinate_cdf(int k, double x) const {
  require(k >= 0 && k < dim(), "coordinate_cdf: index out of range");
  switch (kind_) {
    case Kind::ProductOfUnivariates:
      return laws_[static_cast<std::size_t>(k)].cdf(x);
    case Kind::JointNormal:
      return normal_cdf((x - mean_(k)) / std::sqrt(cov_(k, k)));
    case Kind::EmpiricalJoint: {
      std::vector<double> s(points_.col(k).data(), points_.col(k).data() + points_.rows());
      std::sort(s.begin(), s.end());
      return MarginalSpec::empirical(std::move(s)).cdf(x);
    }
  }
  return 0.0;
}

double MarginalBlock::coordinate_quantile(int k, double u) const {
  require(k >= 0 && k < dim(), "coordinate_quantile: index out of range");
  switch (kind_) {
    case Kind::ProductOfUnivariates:
      return laws_[static_cast<std::size_t>(k)].quantile(u);
    case Kind::JointNormal:
      return mean_(k) + std::sqrt(cov_(k, k)) * normal_quantile(u);
    case Kind::EmpiricalJoint: {
      std::vector<double> s(points_.col(k).data(), points_.col(k).data() + points_.rows());
      std::sort(s.begin(), s.end());
      return quantile_type7(s, u);
    }
  }
  return u;
}

Vector MarginalBlock::coordinate_sds() const {
  Vector out(dim());
  switch (kind_) {
    case Kind::ProductOfUnivariates:
      for (int i = 0; i < dim(); ++i) out(i) = laws_[static_cast<std::size_t>(i)].sd();
      return out;
    case Kind::JointNormal:
      for (int i = 0; i < dim(); ++i) out(i) = std::sqrt(cov_(i, i));
      return out;
    case Kind::EmpiricalJoint: {
      for (int i = 0; i < dim(); ++i) {
        Vector col = points_.col(i);
        double m = col.mean();
        out(i) = std::sqrt((col.array() - m).square().sum() /
                           static_cast<double>(points_.rows() - 1));
      }
      return out;
    }
  }
  return out;
}

Copula Copula::comonotone() {
  Copula c;
  c.kind_ = Kind::Comonotone;
  return c;
}

Copula Copula::independence() { return Copula{}; }

Copula Copula::gaussian(Matrix correlation) {
  Copula c;
  c.kind_ = Kind::Gaussian;
  c.chol_ = correlation_cholesky(correlation);
  c.corr_ = std::move(correlation);
  return c;
}

Copula Copula::student_t(double dof, Matrix correlation) {
  require(dof > 0.0, "student_t copula: dof must be positive");
  Copula c;
  c.kind_ = Kind::StudentT;
  c.dof_ = dof;
  c.chol_ = correlation_cholesky(correlation);
  c.corr_ = std::move(correlation);
  return c;
}

Copula Copula::explicit_joint(Matrix points) {
  require(points.rows() >= 2, "explicit_joint: need at least two points");
  Copula c;
  c.kind_ = Kind::ExplicitJointSamples;
  c.points_ = std::move(points);
  return c;
}

ReferenceMeasure::ReferenceMeasure(std::vector<MarginalBlock> blocks, Copula copula)
    : blocks_(std::move(blocks)), copula_(std::move(copula)) {
  require(!blocks_.empty(), "reference measure: need at least one block");
  for (const auto& b : blocks_) dim_ += b.dim();
  std::set<int> seen;
  coordinate_map_.assign(static_cast<std::size_t>(dim_), {-1, -1});
  for (std::size_t bi = 0; bi < blocks_.size(); ++bi) {
    const auto& coords = blocks_[bi].coordinates();
    for (std::size_t k = 0; k < coords.size(); ++k) {
      int c = coords[k];
      require(c >= 0 && c < dim_, "block coordinates must lie in 0..d-1");
      require(seen.insert(c).second, "block coordinate lists must be disjoint");
      coordinate_map_[static_cast<std::size_t>(c)] = {static_cast<int>(bi), static_cast<int>(k)};
    }
  }
  require(static_cast<int>(seen.size()) == dim_, "block coordinates must partition 0..d-1");

  switch (copula_.kind()) {
    case Copula::Kind::Comonotone:
    case Copula::Kind::Gaussian:
    case Copula::Kind::StudentT:
      for (const auto& b : blocks_)
        require(b.dim() == 1,
                "comonotone/gaussian/student-t copulas couple univariate blocks only");
      if (copula_.kind() != Copula::Kind::Comonotone)
        require(copula_.correlation().rows() == dim_, "copula correlation dimension mismatch");
      break;
    case Copula::Kind::ExplicitJointSamples:
      require(copula_.points().cols() == dim_, "explicit joint samples dimension mismatch");
      break;
    case Copula::Kind::Independence:
      break;
  }
}

std::pair<int, int> ReferenceMeasure::locate(int coordinate) const {
  require(coordinate >= 0 && coordinate < dim_, "coordinate out of range");
  return coordinate_map_[static_cast<std::size_t>(coordinate)];
}

void ReferenceMeasure::sample_row(Eigen::Ref<Vector> row, RandomSource& rng) const {
  switch (copula_.kind()) {
    case Copula::Kind::Comonotone: {
      double u = rng.uniform();
      for (int c = 0; c < dim_; ++c) {
        auto [bi, _] = coordinate_map_[static_cast<std::size_t>(c)];
        row(c) = blocks_[static_cast<std::size_t>(bi)].quantile1d(u);
      }
      return;
    }
    case Copula::Kind::Independence: {
      for (const auto& b : blocks_) {
        Vector v(b.dim());
        b.sample_into(v, rng);
        for (int k = 0; k < b.dim(); ++k) row(b.coordinates()[static_cast<std::size_t>(k)]) = v(k);
      }
      return;
    }
    case Copula::Kind::Gaussian: {
      Vector z(dim_);
      for (int c = 0; c < dim_; ++c) z(c) = rng.normal();
      Vector corr_z = copula_.cholesky() * z;
      for (int c = 0; c < dim_; ++c) {
        auto [bi, _] = coordinate_map_[static_cast<std::size_t>(c)];
        row(c) = blocks_[static_cast<std::size_t>(bi)].quantile1d(normal_cdf(corr_z(c)));
      }
      return;
    }
    case Copula::Kind::StudentT: {
      Vector z(dim_);
      for (int c = 0; c < dim_; ++c) z(c) = rng.normal();
      Vector corr_z = copula_.cholesky() * z;
      double w = rng.chi_squared(copula_.dof()) / copula_.dof();
      double scale = 1.0 / std::sqrt(w);
      for (int c = 0; c < dim_; ++c) {
        auto [bi, _] = coordinate_map_[static_cast<std::size_t>(c)];
        double u = t_cdf(corr_z(c) * scale, copula_.dof());
        row(c) = blocks_[static_cast<std::size_t>(bi)].quantile1d(u);
      }
      return;
    }
    case Copula::Kind::ExplicitJointSamples: {
      auto r = rng.index(static_cast<std::size_t>(copula_.points().rows()));
      row = copula_.points().row(static_cast<Eigen::Index>(r)).transpose();
      return;
    }
  }
}

Matrix ReferenceMeasure::sample(std::size_t n, RandomSource& rng) const {
  require(n >= 1, "sample: n must be positive");
  Matrix out(static_cast<Eigen::Index>(n), dim_);
  Vector row(dim_);
  for (std::size_t i = 0; i < n; ++i) {
    sample_row(row, rng);
    out.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  return out;
}

Matrix ReferenceMeasure::sample_product_of_blocks(std::size_t n, RandomSource& rng) const {
  require(n >= 1, "sample: n must be positive");
  Matrix out(static_cast<Eigen::Index>(n), dim_);
  Vector v(dim_);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& b : blocks_) {
      Vector bv(b.dim());
      b.sample_into(bv, rng);
      for (int k = 0; k < b.dim(); ++k)
        out(static_cast<Eigen::Index>(i), b.coordinates()[static_cast<std::size_t>(k)]) = bv(k);
    }
  }
  return out;
}

Vector ReferenceMeasure::coordinate_sds() const {
  Vector out(dim_);
  for (const auto& b : blocks_) {
    Vector s = b.coordinate_sds();
    for (int k = 0; k < b.dim(); ++k) out(b.coordinates()[static_cast<std::size_t>(k)]) = s(k);
  }
  return out;
}

double ReferenceMeasure::coordinate_cdf(int coordinate, double x) const {
  auto [bi, k] = locate(coordinate);
  return blocks_[static_cast<std::size_t>(bi)].coordinate_cdf(k, x);
}

double ReferenceMeasure::coordinate_quantile(int coordinate, double u) const {
  auto [bi, k] = locate(coordinate);
  return blocks_[static_cast<std::size_t>(bi)].coordinate_quantile(k, u);
}

}  // namespace robustagg
