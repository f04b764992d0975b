#pragma once

namespace robustagg {

/// Standard normal distribution function.
double normal_cdf(double x);

/// Standard normal quantile on (0,1). Acklam's rational approximation with
/// one Halley refinement step; absolute error well below 1e-13.
double normal_quantile(double u);

/// Regularized incomplete beta function I_x(a,b) for a,b > 0, x in [0,1].
/// Continued fraction (modified Lentz), symmetric splitting for stability.
double regularized_incomplete_beta(double a, double b, double x);

/// Student-t distribution function with dof > 0. Absolute error <= 1e-10.
double t_cdf(double x, double dof);

}  // namespace robustagg
