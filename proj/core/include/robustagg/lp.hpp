#pragma once

#include "robustagg/objectives.hpp"
#include "robustagg/simplex.hpp"

namespace robustagg::lp {

/// Grid data for the finite reformulation: a uniform reference measure on n
/// points, a max-affine objective, a separable cost and a ball radius. The
/// grid supports X_i are spanned by the same points.
struct DiscreteInstance {
  Matrix points;  // n x d
  std::vector<AffinePiece> pieces;
  CostSpec cost = CostSpec::l1();
  double rho = 0.0;

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index d() const { return points.cols(); }
  Eigen::Index m_pieces() const { return static_cast<Eigen::Index>(pieces.size()); }

  void validate() const;
};

/// The dual reformulation as a linear program:
///   min  lambda rho + (1/n) sum_{i,j} h_i(j) + (1/n) sum_j g(j)
///   s.t. g(j) >= b^m + sum_i u_i(j,m)
///        u_i(j,m) >= a_i^m x_i^k - h_i(k) - lambda c_i(x_i^j, x_i^k)
///        lambda >= 0
/// Exactly 1 + dn + n + dnM variables and nM + d n^2 M + 1 rows.
LpProblem build_dual_lp(const DiscreteInstance& inst);

/// The grid coupling problem (the feasible set of the duality, restricted to
/// the grid): maximize sum pi(x^j, y) f(y) over couplings with first marginal
/// uniform on the points, y-marginals uniform on each grid support, and
/// transport cost at most rho. Returned as a minimization of -f; the robust
/// value is minus the LP optimum.
LpProblem build_primal_lp(const DiscreteInstance& inst);

/// Convenience: certified optimal robust value on the grid via either route.
double dual_lp_value(const DiscreteInstance& inst);
double primal_lp_value(const DiscreteInstance& inst);

}  // namespace robustagg::lp
