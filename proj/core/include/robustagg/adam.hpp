#pragma once

#include "robustagg/mlp.hpp"

namespace robustagg {

/// Adam first/second-moment state mirroring a network's parameters.
/// Defaults are the training recipe's beta1 = 0.99, beta2 = 0.995.
class AdamState {
 public:
  explicit AdamState(const Mlp& net, double beta1 = 0.99, double beta2 = 0.995,
                     double delta = 1e-8);

  long step_count() const { return step_; }

  /// One bias-corrected Adam update of net's parameters. Throws
  /// numerical_error on non-finite gradients so the caller can abort with
  /// diagnostics.
  void step(Mlp& net, const MlpGrad& grad, double lr);

 private:
  double beta1_, beta2_, delta_;
  long step_ = 0;
  std::vector<AffineLayer> m_;
  std::vector<AffineLayer> v_;
};

/// Piecewise-constant decay: rate alpha0 for the first n_warm iterations,
/// then alpha0 * decay^floor((t - n_warm)/period) during refinement.
/// Iterations are 1-based.
struct LrSchedule {
  double alpha0 = 1e-4;
  long n_warm = 0;
  double decay = 0.98;
  long period = 50;

  double rate(long t) const;
};

}  // namespace robustagg
