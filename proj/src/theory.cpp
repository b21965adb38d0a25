#include "fdrlab/theory.hpp"

#include "fdrlab/dist.hpp"

#include <algorithm>
#include <cmath>

namespace fdrlab {

namespace {

// cosh via exp with the argument clamped so extreme thresholds saturate
// instead of overflowing.
double safe_cosh(double arg) {
  const double a = std::min(std::fabs(arg), 700.0);
  return 0.5 * (std::exp(a) + std::exp(-a));
}

}  // namespace

double SkewProfile::validity_cap() const {
  return std::pow(static_cast<double>(n), 0.25);
}

bool SkewProfile::near_cap(double t) const { return t > 0.8 * validity_cap(); }

double inflation_factor(double t, const SkewProfile& profile) {
  if (t < 0.0) throw DomainError("inflation_factor requires t >= 0");
  if (profile.n < 1) throw DomainError("profile needs n >= 1");
  if (profile.kappa.size() == 0) return 1.0;
  const double scale = t * t * t / (3.0 * std::sqrt(static_cast<double>(profile.n)));
  double sum = 0.0;
  for (Index i = 0; i < profile.kappa.size(); ++i) {
    sum += safe_cosh(scale * profile.kappa[i]);
  }
  return sum / static_cast<double>(profile.kappa.size());
}

double g_kappa(double t, const SkewProfile& profile) {
  if (t < 0.0) throw DomainError("g_kappa requires t >= 0");
  const double te = std::min(t, profile.validity_cap());
  return std::min(1.0, normal_sf2(te) * inflation_factor(te, profile));
}

double g_kappa_inverse(double p, const SkewProfile& profile) {
  if (!(p > 0.0 && p <= 1.0)) throw DomainError("g_kappa_inverse requires 0 < p <= 1");
  if (p == 1.0) return 0.0;
  const double cap = profile.validity_cap();

  // G_kappa decreases from 1 but can turn upward before the cap when the
  // skewness term takes over; scan for the first downward crossing and
  // bisect inside it.
  constexpr int kScan = 4096;
  double lo = 0.0;
  double g_lo = 1.0;
  double hi = -1.0;
  for (int j = 1; j <= kScan; ++j) {
    const double t = cap * static_cast<double>(j) / kScan;
    const double g = g_kappa(t, profile);
    if (g <= p) {
      hi = t;
      break;
    }
    lo = t;
    g_lo = g;
  }
  (void)g_lo;
  if (hi < 0.0) {
    throw NotBracketedError("target below G_kappa over the validity range");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g_kappa(mid, profile) <= p) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-14 * (1.0 + hi)) break;
  }
  return hi;
}

double predict_fdr(double alpha, Index m, Index m0, const SkewProfile& profile,
                   double t_hat) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (m0 < 1 || m0 > m) throw DomainError("need 0 < m0 <= m");
  const double null_fraction = static_cast<double>(m0) / static_cast<double>(m);
  const double cap = 2.0 / (alpha * null_fraction);
  const double factor = std::min(inflation_factor(t_hat, profile), cap);
  return null_fraction * alpha * factor;
}

}  // namespace fdrlab
