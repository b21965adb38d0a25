#pragma once

#include "fdrlab/core.hpp"
#include "fdrlab/rng.hpp"
#include "fdrlab/tstats.hpp"

#include <limits>
#include <span>
#include <vector>

namespace fdrlab {

/// Optional diagnostics attached to a p-value vector.
struct PValueDiagnostics {
  Index pool_size = 0;            // N*m for pooled bootstrap calibrations
  double lambda_scalar = std::numeric_limits<double>::quiet_NaN();  // CV mode
  double truncated_fraction = std::numeric_limits<double>::quiet_NaN();
  Index degenerate_redraws = 0;   // resamples that had to be redrawn
  Index cv_skipped_columns = 0;   // columns excluded from the CV risk
};

struct PValueVector {
  Vector p;
  Calibration method = Calibration::Normal;
  PValueDiagnostics meta;
};

/// Sorted pool of N*m absolute bootstrap t statistics; evaluation at t gives
/// the fraction of pooled values >= t.
class PooledBootstrapEcdf {
 public:
  explicit PooledBootstrapEcdf(std::vector<double> abs_t);

  double evaluate(double t) const;
  Index size() const { return static_cast<Index>(sorted_abs_t_.size()); }
  const std::vector<double>& sorted_values() const { return sorted_abs_t_; }

 private:
  std::vector<double> sorted_abs_t_;
};

/// Per-variable truncation levels for the regularized bootstrap.
struct TruncationPlan {
  Vector lambda;  // lambda_ni > 0
  LambdaMode mode = LambdaMode::fixed_rate();
  double lambda_scalar = std::numeric_limits<double>::quiet_NaN();  // CV mode
};

/// CV risk curve, reported by cv_select_lambda and the lambda CLI command.
struct CvCurve {
  std::vector<double> lambda;
  std::vector<double> risk;  // R_0 + R_1 per candidate
  double lambda_hat = 0.0;
  Index skipped_columns = 0;
};

PValueVector pvals_normal(const TestStatVector& stats);
PValueVector pvals_student_t(const TestStatVector& stats, Index n);

/// Pools N resampled t statistics per variable, each resample drawn with
/// replacement from its column and centered at that column's mean. Variable i
/// consumes the child stream rng.split(i), so parallel and serial runs agree.
PooledBootstrapEcdf bootstrap_pooled_ecdf(const DataMatrix& x, int resamples,
                                          const RandomStream& rng,
                                          int threads = 1,
                                          PValueDiagnostics* diag = nullptr);

PValueVector pvals_bootstrap(const TestStatVector& stats,
                             const PooledBootstrapEcdf& ecdf);

/// Per-variable (non-pooled) bootstrap p-values, two-sided.
PValueVector pvals_bootstrap_individual(const TestStatVector& stats,
                                        const DataMatrix& x, int resamples,
                                        const RandomStream& rng,
                                        int threads = 1);

/// Zeroes entries with |X_ki| > lambda_i; throws AllTruncatedError if a
/// column comes out constant.
DataMatrix truncate_matrix(const DataMatrix& x, const TruncationPlan& plan);

/// lambda_i = |mean_i| + sd_i * c * (n / log m)^{1/6}.
TruncationPlan fixed_rate_lambda(const DataMatrix& x, double c = 1.0);

/// Divisor-n skewness of the column after zeroing entries beyond lambda.
double truncated_skewness(const Eigen::Ref<const Vector>& col, double lambda);

/// 30 log-spaced candidates from 0.5 up to the largest standardized absolute
/// deviation in the matrix (so the top candidate leaves the data untouched).
std::vector<double> default_cv_grid(const DataMatrix& x, int points = 30);

/// Split-sample risk minimization for the truncation scale; ties resolve to
/// the smallest candidate.
TruncationPlan cv_select_lambda(const DataMatrix& x,
                                std::span<const double> grid,
                                CvCurve* curve = nullptr);

/// Truncates, rebuilds the pooled bootstrap ECDF from the truncated data, and
/// evaluates it at the original |T_i|.
PValueVector pvals_regularized_bootstrap(const DataMatrix& x,
                                         const TruncationPlan& plan,
                                         int resamples,
                                         const RandomStream& rng,
                                         const TestStatVector& stats,
                                         int threads = 1);

}  // namespace fdrlab
