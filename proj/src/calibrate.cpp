#include "fdrlab/calibrate.hpp"

#include "fdrlab/dist.hpp"
#include "fdrlab/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>

namespace fdrlab {

namespace {

constexpr int kMaxResampleAttempts = 100;

/// Divisor-n mean/sd/skewness of a raw range, with the degeneracy rule shared
/// with tstats.
struct HalfStats {
  double mean = 0.0;
  double sd = 0.0;  // divisor n
  std::optional<double> skew;
};

HalfStats range_stats(const double* v, Index len) {
  Eigen::Map<const Vector> col(v, len);
  const auto mom = detail::column_moments(col);
  HalfStats hs;
  hs.mean = mom.mean;
  hs.sd = std::sqrt(mom.m2);
  if (!detail::is_degenerate(mom)) {
    hs.skew = mom.m3 / (mom.m2 * std::sqrt(mom.m2));
  }
  return hs;
}

/// Divisor-n skewness of the range after zeroing entries beyond cut.
/// nullopt when the truncated sample is constant.
std::optional<double> truncated_skew_impl(const double* v, Index len, double cut,
                                          std::vector<double>& scratch) {
  scratch.resize(static_cast<std::size_t>(len));
  for (Index k = 0; k < len; ++k) {
    scratch[static_cast<std::size_t>(k)] = std::fabs(v[k]) <= cut ? v[k] : 0.0;
  }
  Eigen::Map<const Vector> col(scratch.data(), len);
  const auto mom = detail::column_moments(col);
  if (detail::is_degenerate(mom)) return std::nullopt;
  return mom.m3 / (mom.m2 * std::sqrt(mom.m2));
}

/// |T*| pool for one column: resamples drawn with replacement, centered at
/// the column's own mean. Constant resamples are redrawn.
void fill_column_pool(const double* col, Index n, double center, int resamples,
                      RandomStream stream, double* out, Index& redraws) {
  std::vector<double> buf(static_cast<std::size_t>(n));
  const double root_n = std::sqrt(static_cast<double>(n));
  for (int k = 0; k < resamples; ++k) {
    int attempts = 0;
    double lo = 0.0, hi = 0.0;
    for (;;) {
      ++attempts;
      lo = hi = col[stream.uniform_below(static_cast<std::uint64_t>(n))];
      buf[0] = lo;
      for (Index j = 1; j < n; ++j) {
        const double v = col[stream.uniform_below(static_cast<std::uint64_t>(n))];
        buf[static_cast<std::size_t>(j)] = v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > lo) break;
      ++redraws;
      if (attempts >= kMaxResampleAttempts) {
        throw DegenerateColumnError(
            -1, "bootstrap resample constant after 100 redraws");
      }
    }
    Eigen::Map<const Vector> z(buf.data(), n);
    const double resample_mean = z.mean();
    const double ssd = (z.array() - resample_mean).square().sum();
    const double sd = std::sqrt(ssd / static_cast<double>(n - 1));
    const double tstar = (resample_mean - center) / (sd / root_n);
    out[k] = std::fabs(tstar);
  }
}

/// Pooled |T*| values over all variables, sorted ascending. Variable i uses
/// rng.split(i); slices are disjoint, so the pool does not depend on the
/// thread count.
std::vector<double> pooled_abs_tstats(const Matrix& values, int resamples,
                                      const RandomStream& rng, int threads,
                                      PValueDiagnostics* diag) {
  const Index n = values.rows();
  const Index m = values.cols();
  std::vector<double> pool(static_cast<std::size_t>(m) * resamples);
  std::vector<Index> redraws(static_cast<std::size_t>(m), 0);
  detail::parallel_for(m, threads, [&](std::int64_t i) {
    try {
      fill_column_pool(values.col(i).data(), n, values.col(i).mean(), resamples,
                       rng.split(static_cast<std::uint64_t>(i)),
                       pool.data() + static_cast<std::size_t>(i) * resamples,
                       redraws[static_cast<std::size_t>(i)]);
    } catch (const DegenerateColumnError&) {
      throw DegenerateColumnError(i, "bootstrap resample constant after 100 redraws");
    }
  });
  if (diag) {
    diag->pool_size = static_cast<Index>(pool.size());
    diag->degenerate_redraws = 0;
    for (Index r : redraws) diag->degenerate_redraws += r;
  }
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace

PooledBootstrapEcdf::PooledBootstrapEcdf(std::vector<double> abs_t)
    : sorted_abs_t_(std::move(abs_t)) {
  std::sort(sorted_abs_t_.begin(), sorted_abs_t_.end());
}

double PooledBootstrapEcdf::evaluate(double t) const {
  const auto it =
      std::lower_bound(sorted_abs_t_.begin(), sorted_abs_t_.end(), t);
  const auto at_least = sorted_abs_t_.end() - it;
  return static_cast<double>(at_least) / static_cast<double>(sorted_abs_t_.size());
}

PValueVector pvals_normal(const TestStatVector& stats) {
  PValueVector out;
  out.method = Calibration::Normal;
  out.p = stats.t.cwiseAbs().unaryExpr([](double t) { return normal_sf2(t); });
  return out;
}

PValueVector pvals_student_t(const TestStatVector& stats, Index n) {
  if (n < 2) throw ValidationError("pvals_student_t needs n >= 2");
  const int df = static_cast<int>(n) - 1;
  PValueVector out;
  out.method = Calibration::StudentT;
  out.p = stats.t.cwiseAbs().unaryExpr([df](double t) { return t_sf2(t, df); });
  return out;
}

PooledBootstrapEcdf bootstrap_pooled_ecdf(const DataMatrix& x, int resamples,
                                          const RandomStream& rng, int threads,
                                          PValueDiagnostics* diag) {
  if (resamples < 1) throw ValidationError("resample count must be >= 1");
  return PooledBootstrapEcdf(
      pooled_abs_tstats(x.values, resamples, rng, threads, diag));
}

PValueVector pvals_bootstrap(const TestStatVector& stats,
                             const PooledBootstrapEcdf& ecdf) {
  PValueVector out;
  out.method = Calibration::Bootstrap;
  out.meta.pool_size = ecdf.size();
  out.p = stats.t.cwiseAbs().unaryExpr(
      [&ecdf](double t) { return ecdf.evaluate(t); });
  return out;
}

PValueVector pvals_bootstrap_individual(const TestStatVector& stats,
                                        const DataMatrix& x, int resamples,
                                        const RandomStream& rng, int threads) {
  if (resamples < 1) throw ValidationError("resample count must be >= 1");
  const Index n = x.samples();
  const Index m = x.variables();
  if (stats.t.size() != m) throw DimensionMismatchError("stats/matrix mismatch");
  PValueVector out;
  out.method = Calibration::Bootstrap;
  out.meta.pool_size = resamples;
  out.p.resize(m);
  std::vector<Index> redraws(static_cast<std::size_t>(m), 0);
  detail::parallel_for(m, threads, [&](std::int64_t i) {
    std::vector<double> pool(static_cast<std::size_t>(resamples));
    try {
      fill_column_pool(x.values.col(i).data(), n, x.values.col(i).mean(),
                       resamples, rng.split(static_cast<std::uint64_t>(i)),
                       pool.data(), redraws[static_cast<std::size_t>(i)]);
    } catch (const DegenerateColumnError&) {
      throw DegenerateColumnError(i, "bootstrap resample constant after 100 redraws");
    }
    const double abs_t = std::fabs(stats.t[i]);
    Index count = 0;
    for (double v : pool) count += (v >= abs_t);
    out.p[i] = static_cast<double>(count) / static_cast<double>(resamples);
  });
  return out;
}

DataMatrix truncate_matrix(const DataMatrix& x, const TruncationPlan& plan) {
  if (plan.lambda.size() != x.variables()) {
    throw DimensionMismatchError("truncation plan size != variable count");
  }
  Matrix out = x.values;
  for (Index i = 0; i < out.cols(); ++i) {
    const double cut = plan.lambda[i];
    if (!(cut > 0.0)) throw ValidationError("truncation level must be positive");
    auto col = out.col(i);
    for (Index k = 0; k < col.size(); ++k) {
      if (std::fabs(col[k]) > cut) col[k] = 0.0;
    }
    if (col.maxCoeff() == col.minCoeff()) throw AllTruncatedError(i);
  }
  return DataMatrix{std::move(out)};
}

TruncationPlan fixed_rate_lambda(const DataMatrix& x, double c) {
  const Index n = x.samples();
  const Index m = x.variables();
  if (m < 2) throw ValidationError("fixed-rate lambda needs m >= 2");
  if (!(c > 0.0)) throw ValidationError("rate constant must be positive");
  const double rate =
      c * std::pow(static_cast<double>(n) / std::log(static_cast<double>(m)),
                   1.0 / 6.0);
  TruncationPlan plan;
  plan.mode = LambdaMode::fixed_rate(c);
  plan.lambda.resize(m);
  for (Index i = 0; i < m; ++i) {
    const auto mom = detail::column_moments(x.column(i));
    const double sd = std::sqrt(mom.m2 * static_cast<double>(n) /
                                static_cast<double>(n - 1));
    const double level = std::fabs(mom.mean) + sd * rate;
    if (!(level > 0.0)) throw DegenerateColumnError(i, "fixed_rate_lambda");
    plan.lambda[i] = level;
  }
  return plan;
}

double truncated_skewness(const Eigen::Ref<const Vector>& col, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("truncation level must be positive");
  std::vector<double> scratch;
  const auto skew = truncated_skew_impl(col.data(), col.size(), lambda, scratch);
  if (!skew) throw DegenerateColumnError(0, "truncated column is constant");
  return *skew;
}

std::vector<double> default_cv_grid(const DataMatrix& x, int points) {
  if (points < 1) throw ValidationError("grid needs at least one point");
  const Index n = x.samples();
  double top = 0.0;
  bool any = false;
  for (Index i = 0; i < x.variables(); ++i) {
    const auto mom = detail::column_moments(x.column(i));
    if (detail::is_degenerate(mom)) continue;
    const double sd = std::sqrt(mom.m2 * static_cast<double>(n) /
                                static_cast<double>(n - 1));
    top = std::max(top, mom.max_abs_dev / sd);
    any = true;
  }
  if (!any) throw DegenerateColumnError(0, "all columns constant");
  constexpr double kLow = 0.5;
  top = std::max(top, kLow);
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(points));
  if (points == 1 || top == kLow) {
    grid.push_back(top);
    return grid;
  }
  const double log_lo = std::log(kLow);
  const double log_hi = std::log(top);
  grid.push_back(kLow);
  for (int j = 1; j + 1 < points; ++j) {
    const double f = static_cast<double>(j) / static_cast<double>(points - 1);
    grid.push_back(std::exp(log_lo + f * (log_hi - log_lo)));
  }
  grid.push_back(top);
  return grid;
}

TruncationPlan cv_select_lambda(const DataMatrix& x,
                                std::span<const double> grid, CvCurve* curve) {
  if (grid.empty()) throw EmptyGridError();
  const Index n = x.samples();
  const Index m = x.variables();
  if (n < 4) throw ValidationError("cross-validation needs n >= 4");

  const Index n0 = n / 2;
  const Index half_len[2] = {n0, n - n0};

  // Per column and half: base stats plus the untruncated skewness the other
  // half's truncated skewness is matched against.
  struct ColumnHalf {
    const double* data;
    Index len;
    HalfStats stats;
  };
  std::vector<std::array<ColumnHalf, 2>> columns;
  columns.reserve(static_cast<std::size_t>(m));
  Index skipped = 0;
  for (Index i = 0; i < m; ++i) {
    const double* base = x.values.col(i).data();
    std::array<ColumnHalf, 2> halves{
        ColumnHalf{base, half_len[0], range_stats(base, half_len[0])},
        ColumnHalf{base + n0, half_len[1], range_stats(base + n0, half_len[1])}};
    if (!halves[0].stats.skew || !halves[1].stats.skew) {
      // No untruncated target on one half: the column is unusable at every
      // candidate, matching the inert top of the default grid.
      ++skipped;
      continue;
    }
    columns.push_back(halves);
  }

  double best_risk = std::numeric_limits<double>::infinity();
  double best_lambda = std::numeric_limits<double>::infinity();
  std::vector<double> scratch;
  if (curve) {
    curve->lambda.assign(grid.begin(), grid.end());
    curve->risk.assign(grid.size(), 0.0);
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double lam = grid[g];
    if (!(lam > 0.0)) throw ValidationError("grid candidates must be positive");
    double risk = 0.0;
    for (const auto& halves : columns) {
      for (int j = 0; j < 2; ++j) {
        const auto& tr = halves[static_cast<std::size_t>(j)];
        const auto& other = halves[static_cast<std::size_t>(1 - j)];
        const double cut = std::fabs(tr.stats.mean) + tr.stats.sd * lam;
        const auto kt = truncated_skew_impl(tr.data, tr.len, cut, scratch);
        // A truncated-to-constant half carries no skewness information.
        const double k_trunc = kt.value_or(0.0);
        const double diff = k_trunc - *other.stats.skew;
        risk += diff * diff;
      }
    }
    if (curve) curve->risk[g] = risk;
    if (risk < best_risk || (risk == best_risk && lam < best_lambda)) {
      best_risk = risk;
      best_lambda = lam;
    }
  }

  TruncationPlan plan;
  plan.mode = LambdaMode::cross_validated();
  plan.lambda_scalar = best_lambda;
  plan.lambda.resize(m);
  for (Index i = 0; i < m; ++i) {
    const auto mom = detail::column_moments(x.column(i));
    const double sd = std::sqrt(mom.m2 * static_cast<double>(n) /
                                static_cast<double>(n - 1));
    const double level = std::fabs(mom.mean) + sd * best_lambda;
    if (!(level > 0.0)) throw DegenerateColumnError(i, "cv_select_lambda");
    plan.lambda[i] = level;
  }
  if (curve) {
    curve->lambda_hat = best_lambda;
    curve->skipped_columns = skipped;
  }
  return plan;
}

PValueVector pvals_regularized_bootstrap(const DataMatrix& x,
                                         const TruncationPlan& plan,
                                         int resamples,
                                         const RandomStream& rng,
                                         const TestStatVector& stats,
                                         int threads) {
  const DataMatrix truncated = truncate_matrix(x, plan);
  PValueDiagnostics diag;
  diag.lambda_scalar = plan.lambda_scalar;
  diag.truncated_fraction =
      static_cast<double>((x.values.array() != truncated.values.array()).count()) /
      static_cast<double>(x.values.size());
  const PooledBootstrapEcdf ecdf(
      pooled_abs_tstats(truncated.values, resamples, rng, threads, &diag));
  PValueVector out;
  out.method = Calibration::RegularizedBootstrap;
  out.meta = diag;
  out.p = stats.t.cwiseAbs().unaryExpr(
      [&ecdf](double t) { return ecdf.evaluate(t); });
  return out;
}

}  // namespace fdrlab
