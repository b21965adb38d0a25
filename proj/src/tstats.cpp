#include "fdrlab/tstats.hpp"

#include <cmath>

namespace fdrlab {

TestStatVector t_statistics(const DataMatrix& x) {
  const Index n = x.samples();
  const Index m = x.variables();
  TestStatVector stats;
  stats.n = n;
  stats.t.resize(m);
  stats.mean.resize(m);
  stats.sd.resize(m);
  stats.skew.resize(m);
  const double root_n = std::sqrt(static_cast<double>(n));
  for (Index i = 0; i < m; ++i) {
    const auto mom = detail::column_moments(x.column(i));
    if (detail::is_degenerate(mom)) throw DegenerateColumnError(i);
    const double var_unbiased = mom.m2 * static_cast<double>(n) / static_cast<double>(n - 1);
    stats.mean[i] = mom.mean;
    stats.sd[i] = std::sqrt(var_unbiased);
    stats.t[i] = mom.mean / (stats.sd[i] / root_n);
    stats.skew[i] = mom.m3 / (mom.m2 * std::sqrt(mom.m2));
  }
  return stats;
}

double column_skewness(const Eigen::Ref<const Vector>& col) {
  const auto mom = detail::column_moments(col);
  if (detail::is_degenerate(mom)) throw DegenerateColumnError(0, "column_skewness");
  return mom.m3 / (mom.m2 * std::sqrt(mom.m2));
}

}  // namespace fdrlab
