#pragma once

#include "robustagg/common.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace robustagg {

/// Auxiliary scalars entering an objective (currently only "tau" for AVaR).
using AuxMap = std::map<std::string, double>;

struct AffinePiece {
  Vector a;
  double b = 0.0;
};

/// Integrand f of the robust evaluation problem. Sup-problems are evaluated
/// as stated; inf-problems wrap the integrand in negated() and negate the
/// reported value.
class ObjectiveSpec {
 public:
  enum class Kind { MaxCoordinates, MaxAffine, AVaRIntegrand, SumSquaredCentered, Negated };
  enum class Sense { Sup, Inf };

  static ObjectiveSpec max_coordinates();
  static ObjectiveSpec max_affine(std::vector<AffinePiece> pieces);
  /// tau + (sum_i y_i - tau)^+ / (1-alpha); the AVaR epigraph integrand.
  static ObjectiveSpec avar_integrand(double alpha);
  /// (sum_i y_i)^2 - m^2 with m the fixed mean of the sum.
  static ObjectiveSpec sum_squared_centered(double m);
  /// Pointwise negation; negated(negated(f)) collapses back to f.
  static ObjectiveSpec negated(ObjectiveSpec inner);

  Kind kind() const { return kind_; }
  Sense sense() const { return sense_; }
  ObjectiveSpec with_sense(Sense s) const;

  double value(const Eigen::Ref<const Vector>& y, const AuxMap& aux = {}) const;

  /// True when the integrand involves an auxiliary scalar "tau".
  bool uses_aux() const;
  /// d f / d tau at (y, aux); zero for objectives without aux.
  double aux_partial(const Eigen::Ref<const Vector>& y, const AuxMap& aux) const;
  /// +1 when tau is minimized jointly with the dual potentials, -1 when it is
  /// maximized (negated AVaR), 0 when there is no aux.
  int aux_direction() const;

  /// AVaR level alpha of the (possibly negated) integrand.
  double avar_alpha() const;
  const std::vector<AffinePiece>& pieces() const;
  double centering() const { return m_; }

 private:
  ObjectiveSpec() = default;
  Kind kind_ = Kind::MaxCoordinates;
  Sense sense_ = Sense::Sup;
  double alpha_ = 0.0;
  double m_ = 0.0;
  std::vector<AffinePiece> pieces_;
  std::shared_ptr<const ObjectiveSpec> inner_;
};

/// Transport cost c(x,y): nonnegative, symmetric, zero on the diagonal.
class CostSpec {
 public:
  enum class Kind { L1, L2Euclid, ScaledL1, ScalarMultiple };

  static CostSpec l1();
  static CostSpec l2_euclid();
  /// sum_i |x_i - y_i| / w_i with positive weights w.
  static CostSpec scaled_l1(Vector weights);
  static CostSpec scalar_multiple(CostSpec inner, double factor);

  Kind kind() const { return kind_; }
  double value(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const;

  /// Whether c(x,y) = sum_i c_i(x_i,y_i); required by the LP reformulation.
  bool separable() const;
  /// The i-th separable piece evaluated at scalars (s,t).
  double piece(int i, double s, double t) const;

  const Vector& weights() const { return weights_; }
  double factor() const { return factor_; }
  const CostSpec& inner() const;

 private:
  CostSpec() = default;
  Kind kind_ = Kind::L1;
  Vector weights_;
  double factor_ = 1.0;
  std::shared_ptr<const CostSpec> inner_;
};

/// Penalization of the transport distance: phi applied to d_c. Only the
/// convex conjugate phi* and its derivative enter the solved objective.
class AmbiguitySpec {
 public:
  enum class Kind { Ball, PowerPenalty, LinearPenalty };

  /// Hard ball of radius rho: phi = infinity outside [0, rho], phi*(l) = rho l.
  static AmbiguitySpec ball(double rho);
  /// phi(x) = x^r / r with r > 1; phi*(l) = (r-1)/r l^{r/(r-1)}.
  static AmbiguitySpec power_penalty(double r);
  /// phi(x) = x; the multiplier is pinned to 1 and phi*(1) = 0.
  static AmbiguitySpec linear_penalty();

  Kind kind() const { return kind_; }
  double phi_star(double lambda) const;
  double phi_star_derivative(double lambda) const;
  bool lambda_fixed() const { return kind_ == Kind::LinearPenalty; }
  double rho() const;
  double exponent() const;

 private:
  AmbiguitySpec() = default;
  Kind kind_ = Kind::Ball;
  double rho_ = 0.0;
  double r_ = 2.0;
};

/// Quadratic-hinge penalization beta_gamma(x) = gamma max(0,x)^2.
struct PenaltySpec {
  double gamma;

  explicit PenaltySpec(double g);

  double beta(double x) const {
    double p = x > 0.0 ? x : 0.0;
    return gamma * p * p;
  }
  double beta_prime(double x) const { return x > 0.0 ? 2.0 * gamma * x : 0.0; }
  /// Conjugate beta*(y) = y^2 / (4 gamma) on y >= 0; +infinity below zero.
  double beta_star(double y) const;
};

}  // namespace robustagg
