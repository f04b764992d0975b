#pragma once

#include "robustagg/common.hpp"
#include "robustagg/random.hpp"
#include "robustagg/reference_measure.hpp"

namespace robustagg {

/// The measure theta under which the hinge penalty is integrated.
///
///   prod :  mu-bar (x)  tensored with the product of block marginals (y)
///   half :  1/2 prod + 1/2 diagonal coupling (y = x)
///   third:  1/2 prod + 1/4 diagonal + 1/4 diagonal convolved with
///           centered Gaussian noise of per-coordinate sd epsilon
struct SamplingMeasureSpec {
  enum class Kind { Prod, Half, Third };

  Kind kind = Kind::Half;
  /// Per-coordinate noise sd for Third; empty means "0.05 * marginal sd",
  /// resolved against the reference measure at sampling time.
  Vector epsilon;

  static SamplingMeasureSpec prod() { return {Kind::Prod, {}}; }
  static SamplingMeasureSpec half() { return {Kind::Half, {}}; }
  static SamplingMeasureSpec third(Vector eps = {}) { return {Kind::Third, std::move(eps)}; }
};

struct ThetaBatch {
  Matrix x;  // n x d
  Matrix y;  // n x d
};

/// n pairs (x,y) ~ theta, rows aligned.
ThetaBatch sample_theta(const SamplingMeasureSpec& spec, const ReferenceMeasure& ref,
                        std::size_t n, RandomSource& rng);

/// The epsilon vector actually used for a Third spec against this reference.
Vector resolve_epsilon(const SamplingMeasureSpec& spec, const ReferenceMeasure& ref);

}  // namespace robustagg
