#pragma once

#include "fdrlab/core.hpp"

#include <cmath>
#include <limits>

namespace fdrlab {

/// Per-variable t statistics and the sample moments the calibrations need.
/// sd uses divisor n-1 (the t statistic's denominator); skew uses divisor n.
struct TestStatVector {
  Vector t;     // T_i = mean_i / (sd_i / sqrt(n))
  Vector mean;  // column means
  Vector sd;    // divisor n-1
  Vector skew;  // divisor-n standardized third moment
  Index n = 0;  // sample count the statistics came from
};

namespace detail {

struct ColumnMoments {
  double mean = 0.0;
  double m2 = 0.0;  // divisor-n central second moment
  double m3 = 0.0;  // divisor-n central third moment
  double max_abs_dev = 0.0;
};

/// Two-pass central moments of any Eigen column expression.
template <typename Derived>
ColumnMoments column_moments(const Eigen::MatrixBase<Derived>& col) {
  const auto n = static_cast<double>(col.size());
  ColumnMoments mom;
  mom.mean = col.mean();
  const auto centered = (col.derived().array() - mom.mean).eval();
  mom.m2 = centered.square().sum() / n;
  mom.m3 = centered.cube().sum() / n;
  mom.max_abs_dev = centered.abs().maxCoeff();
  return mom;
}

/// A column is degenerate when its spread is zero up to rounding of the mean.
inline bool is_degenerate(const ColumnMoments& mom) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  return mom.m2 == 0.0 || mom.max_abs_dev <= 16.0 * eps * std::fabs(mom.mean);
}

}  // namespace detail

/// T_i = mean_i / (sd_i / sqrt(n)) per column; throws DegenerateColumnError
/// for constant columns.
TestStatVector t_statistics(const DataMatrix& x);

/// Divisor-n skewness of one column: m3 / m2^{3/2}.
double column_skewness(const Eigen::Ref<const Vector>& col);

}  // namespace fdrlab
