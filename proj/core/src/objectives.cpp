#include "robustagg/objectives.hpp"

#include <cmath>

namespace robustagg {

namespace {

double aux_tau(const AuxMap& aux) {
  auto it = aux.find("tau");
  if (it == aux.end()) throw std::logic_error("objective requires aux scalar 'tau'");
  return it->second;
}

}  // namespace

ObjectiveSpec ObjectiveSpec::max_coordinates() {
  ObjectiveSpec s;
  s.kind_ = Kind::MaxCoordinates;
  return s;
}

ObjectiveSpec ObjectiveSpec::max_affine(std::vector<AffinePiece> pieces) {
  require(!pieces.empty(), "max_affine: need at least one piece");
  for (const auto& p : pieces)
    require(p.a.size() == pieces.front().a.size(), "max_affine: inconsistent piece dimensions");
  ObjectiveSpec s;
  s.kind_ = Kind::MaxAffine;
  s.pieces_ = std::move(pieces);
  return s;
}

ObjectiveSpec ObjectiveSpec::avar_integrand(double alpha) {
  require(alpha > 0.0 && alpha < 1.0, "avar: alpha must lie in (0,1)");
  ObjectiveSpec s;
  s.kind_ = Kind::AVaRIntegrand;
  s.alpha_ = alpha;
  return s;
}

ObjectiveSpec ObjectiveSpec::sum_squared_centered(double m) {
  ObjectiveSpec s;
  s.kind_ = Kind::SumSquaredCentered;
  s.m_ = m;
  return s;
}

ObjectiveSpec ObjectiveSpec::negated(ObjectiveSpec inner) {
  if (inner.kind_ == Kind::Negated) {
    ObjectiveSpec out = *inner.inner_;
    out.sense_ = inner.sense_;
    return out;
  }
  ObjectiveSpec s;
  s.kind_ = Kind::Negated;
  s.sense_ = inner.sense_;
  s.inner_ = std::make_shared<const ObjectiveSpec>(std::move(inner));
  return s;
}

ObjectiveSpec ObjectiveSpec::with_sense(Sense sense) const {
  ObjectiveSpec s = *this;
  s.sense_ = sense;
  return s;
}

double ObjectiveSpec::value(const Eigen::Ref<const Vector>& y, const AuxMap& aux) const {
  switch (kind_) {
    case Kind::MaxCoordinates:
      return y.maxCoeff();
    case Kind::MaxAffine: {
      double best = -std::numeric_limits<double>::infinity();
      for (const auto& p : pieces_) best = std::max(best, p.a.dot(y) + p.b);
      return best;
    }
    case Kind::AVaRIntegrand: {
      double tau = aux_tau(aux);
      double excess = y.sum() - tau;
      return tau + (excess > 0.0 ? excess : 0.0) / (1.0 - alpha_);
    }
    case Kind::SumSquaredCentered: {
      double s = y.sum();
      return s * s - m_ * m_;
    }
    case Kind::Negated:
      return -inner_->value(y, aux);
  }
  return 0.0;
}

bool ObjectiveSpec::uses_aux() const {
  if (kind_ == Kind::AVaRIntegrand) return true;
  if (kind_ == Kind::Negated) return inner_->uses_aux();
  return false;
}

double ObjectiveSpec::aux_partial(const Eigen::Ref<const Vector>& y, const AuxMap& aux) const {
  switch (kind_) {
    case Kind::AVaRIntegrand: {
      double tau = aux_tau(aux);
      double ind = y.sum() > tau ? 1.0 : 0.0;
      return 1.0 - ind / (1.0 - alpha_);
    }
    case Kind::Negated:
      return -inner_->aux_partial(y, aux);
    default:
      return 0.0;
  }
}

int ObjectiveSpec::aux_direction() const {
  if (kind_ == Kind::AVaRIntegrand) return +1;
  if (kind_ == Kind::Negated) return -inner_->aux_direction();
  return 0;
}

double ObjectiveSpec::avar_alpha() const {
  if (kind_ == Kind::AVaRIntegrand) return alpha_;
  if (kind_ == Kind::Negated) return inner_->avar_alpha();
  throw std::logic_error("avar_alpha: objective has no AVaR level");
}

const std::vector<AffinePiece>& ObjectiveSpec::pieces() const {
  if (kind_ != Kind::MaxAffine) throw std::logic_error("pieces: not a max-affine objective");
  return pieces_;
}

CostSpec CostSpec::l1() { return CostSpec{}; }

CostSpec CostSpec::l2_euclid() {
  CostSpec c;
  c.kind_ = Kind::L2Euclid;
  return c;
}

CostSpec CostSpec::scaled_l1(Vector weights) {
  require(weights.size() > 0 && (weights.array() > 0.0).all(),
          "scaled_l1: weights must be positive");
  CostSpec c;
  c.kind_ = Kind::ScaledL1;
  c.weights_ = std::move(weights);
  return c;
}

CostSpec CostSpec::scalar_multiple(CostSpec inner, double factor) {
  require(factor > 0.0, "scalar_multiple: factor must be positive");
  CostSpec c;
  c.kind_ = Kind::ScalarMultiple;
  c.factor_ = factor;
  c.inner_ = std::make_shared<const CostSpec>(std::move(inner));
  return c;
}

double CostSpec::value(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) const {
  if (x.size() != y.size()) throw std::logic_error("cost: dimension mismatch");
  switch (kind_) {
    case Kind::L1:
      return (x - y).cwiseAbs().sum();
    case Kind::L2Euclid:
      return (x - y).norm();
    case Kind::ScaledL1: {
      if (x.size() != weights_.size()) throw std::logic_error("scaled_l1: dimension mismatch");
      return ((x - y).cwiseAbs().array() / weights_.array()).sum();
    }
    case Kind::ScalarMultiple:
      return factor_ * inner_->value(x, y);
  }
  return 0.0;
}

bool CostSpec::separable() const {
  switch (kind_) {
    case Kind::L1:
    case Kind::ScaledL1:
      return true;
    case Kind::L2Euclid:
      return false;
    case Kind::ScalarMultiple:
      return inner_->separable();
  }
  return false;
}

double CostSpec::piece(int i, double s, double t) const {
  switch (kind_) {
    case Kind::L1:
      return std::fabs(s - t);
    case Kind::ScaledL1:
      if (i < 0 || i >= weights_.size()) throw std::logic_error("scaled_l1: piece index out of range");
      return std::fabs(s - t) / weights_(i);
    case Kind::ScalarMultiple:
      return factor_ * inner_->piece(i, s, t);
    case Kind::L2Euclid:
      break;
  }
  throw unsupported_instance("cost is not additively separable");
}

const CostSpec& CostSpec::inner() const {
  if (!inner_) throw std::logic_error("cost: no inner spec");
  return *inner_;
}

AmbiguitySpec AmbiguitySpec::ball(double rho) {
  require(rho >= 0.0, "ball: rho must be nonnegative");
  AmbiguitySpec a;
  a.kind_ = Kind::Ball;
  a.rho_ = rho;
  return a;
}

AmbiguitySpec AmbiguitySpec::power_penalty(double r) {
  require(r > 1.0, "power_penalty: r must exceed 1");
  AmbiguitySpec a;
  a.kind_ = Kind::PowerPenalty;
  a.r_ = r;
  return a;
}

AmbiguitySpec AmbiguitySpec::linear_penalty() {
  AmbiguitySpec a;
  a.kind_ = Kind::LinearPenalty;
  return a;
}

double AmbiguitySpec::phi_star(double lambda) const {
  switch (kind_) {
    case Kind::Ball:
      require(lambda >= 0.0, "phi_star: lambda must be nonnegative");
      return rho_ * lambda;
    case Kind::PowerPenalty:
      require(lambda >= 0.0, "phi_star: lambda must be nonnegative");
      return (r_ - 1.0) / r_ * std::pow(lambda, r_ / (r_ - 1.0));
    case Kind::LinearPenalty:
      if (lambda != 1.0)
        throw std::logic_error("linear penalty pins lambda to 1; phi_star(lambda != 1) is not used");
      return 0.0;
  }
  return 0.0;
}

double AmbiguitySpec::phi_star_derivative(double lambda) const {
  switch (kind_) {
    case Kind::Ball:
      return rho_;
    case Kind::PowerPenalty:
      return std::pow(lambda, 1.0 / (r_ - 1.0));
    case Kind::LinearPenalty:
      throw std::logic_error("linear penalty has no free lambda");
  }
  return 0.0;
}

double AmbiguitySpec::rho() const {
  if (kind_ != Kind::Ball) throw std::logic_error("rho: not a ball ambiguity set");
  return rho_;
}

double AmbiguitySpec::exponent() const {
  if (kind_ != Kind::PowerPenalty) throw std::logic_error("exponent: not a power penalty");
  return r_;
}

PenaltySpec::PenaltySpec(double g) : gamma(g) {
  require(g > 0.0, "penalty: gamma must be positive");
}

double PenaltySpec::beta_star(double y) const {
  if (y < 0.0) throw config_error("beta_star: conjugate is +infinity below zero");
  return y * y / (4.0 * gamma);
}

}  // namespace robustagg
