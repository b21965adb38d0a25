#include "fdrlab/bh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fdrlab {

BHResult bh_stepup(std::span<const double> p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const Index m = static_cast<Index>(p.size());
  BHResult result;
  result.m = m;
  if (m == 0) return result;

  std::vector<Index> order(static_cast<std::size_t>(m));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&p](Index a, Index b) {
    return p[static_cast<std::size_t>(a)] != p[static_cast<std::size_t>(b)]
               ? p[static_cast<std::size_t>(a)] < p[static_cast<std::size_t>(b)]
               : a < b;
  });

  Index k_hat = 0;
  for (Index i = m; i >= 1; --i) {
    const double p_i = p[static_cast<std::size_t>(order[static_cast<std::size_t>(i - 1)])];
    if (p_i <= alpha * static_cast<double>(i) / static_cast<double>(m)) {
      k_hat = i;
      break;
    }
  }
  result.k_hat = k_hat;
  if (k_hat == 0) return result;

  result.p_threshold = p[static_cast<std::size_t>(order[static_cast<std::size_t>(k_hat - 1)])];
  for (Index i = 0; i < m; ++i) {
    if (p[static_cast<std::size_t>(i)] <= result.p_threshold) {
      result.rejected.push_back(i);
    }
  }
  result.R = static_cast<Index>(result.rejected.size());
  return result;
}

BHResult bh_stepup(const PValueVector& p, double alpha) {
  return bh_stepup(std::span<const double>(p.p.data(),
                                           static_cast<std::size_t>(p.p.size())),
                   alpha);
}

double bh_threshold_form(std::span<const double> t_abs,
                         const std::function<double(double)>& sf2,
                         double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  const Index m = static_cast<Index>(t_abs.size());
  if (m == 0) throw ValidationError("bh_threshold_form needs at least one statistic");

  // Candidates are the order statistics: with R rejections the threshold sits
  // at the R-th largest |T|, i.e. t_abs[m - R].
  for (Index R = m; R >= 1; --R) {
    const double t = t_abs[static_cast<std::size_t>(m - R)];
    if (sf2(t) <= alpha * static_cast<double>(R) / static_cast<double>(m)) {
      return t;
    }
  }

  // Nothing clears: the infimum is the root of sf2(t) = alpha/m, which lies
  // above the largest statistic, so the rejection set is empty.
  const double target = alpha / static_cast<double>(m);
  double lo = t_abs[static_cast<std::size_t>(m - 1)];
  double hi = std::max(1.0, lo);
  while (sf2(hi) > target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sf2(mid) <= target) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-12 * (1.0 + hi)) break;
  }
  return hi;
}

ErrorMetrics score(const BHResult& result, const GroundTruth& truth) {
  if (result.m != truth.size()) {
    throw DimensionMismatchError("BH result and ground truth sizes differ");
  }
  ErrorMetrics metrics;
  metrics.R = result.R;
  for (Index i : result.rejected) {
    if (truth.is_null[static_cast<std::size_t>(i)]) ++metrics.V;
  }
  metrics.FDP = static_cast<double>(metrics.V) /
                static_cast<double>(std::max<Index>(metrics.R, 1));
  const Index correct = metrics.R - metrics.V;
  metrics.power = truth.alt_count > 0
                      ? static_cast<double>(correct) / static_cast<double>(truth.alt_count)
                      : 0.0;
  return metrics;
}

}  // namespace fdrlab
