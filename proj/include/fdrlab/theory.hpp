#pragma once

#include "fdrlab/core.hpp"

namespace fdrlab {

/// Null skewnesses kappa_i = E Y_i^3 with the sample size, the inputs of the
/// second-order tail expansion.
struct SkewProfile {
  Vector kappa;  // one entry per null hypothesis
  Index n = 0;

  /// The expansion is meaningless past t ~ n^{1/4}; evaluations clamp there.
  double validity_cap() const;
  /// Diagnostic: t close enough to the cap that results get unreliable.
  bool near_cap(double t) const;
};

/// Skewness-corrected two-sided tail
///   G_kappa(t) = G(t) * mean_i cosh(t^3 kappa_i / (3 sqrt(n))),
/// clamped to 1 and evaluated with t capped at n^{1/4}.
double g_kappa(double t, const SkewProfile& profile);

/// inf{y >= 0 : G_kappa(y) = p} on the validity range; throws
/// NotBracketedError when p is below G_kappa at the cap.
double g_kappa_inverse(double p, const SkewProfile& profile);

/// mean_i cosh(t^3 kappa_i / (3 sqrt(n))), always >= 1. Evaluated at the
/// given t (the cosh argument is overflow-guarded); only g_kappa applies the
/// validity cap, since a tail probability is meaningless past it.
double inflation_factor(double t, const SkewProfile& profile);

/// (m0/m) * alpha * min(inflation_factor(t_hat), 2 / (alpha * (1 - m1/m))),
/// the asymptotic FDR of the normal calibration at realized threshold t_hat.
double predict_fdr(double alpha, Index m, Index m0, const SkewProfile& profile,
                   double t_hat);

}  // namespace fdrlab
