#pragma once

namespace fdrlab {

/// G(t) = 2*(1 - Phi(t)) for t >= 0, the two-sided standard normal tail.
/// Relative error <= 1e-12 over t <= 8; throws DomainError for t < 0.
double normal_sf2(double t);

/// Phi(z), accurate in both tails.
double normal_cdf(double z);

/// Phi^{-1}(p) for p in (0,1); safeguarded Newton on the tail function.
double normal_quantile(double p);

/// 2*(1 - Psi_df(t)) for t >= 0, the two-sided Student t tail with df >= 1
/// degrees of freedom, via the regularized incomplete beta function.
double t_sf2(double t, int df);

namespace detail {

/// ln Gamma(x) for x > 0 (Stirling series with recurrence lift below 10).
double log_gamma(double x);

/// Regularized upper incomplete gamma Q(a, x).
double reg_gamma_q(double a, double x);

/// Regularized incomplete beta I_x(a, b).
double reg_beta_inc(double a, double b, double x);

/// erfc(x) for x >= 0 without the 1-erf cancellation in the tail.
double erfc_pos(double x);

}  // namespace detail

}  // namespace fdrlab
