#include "fdrlab/sim.hpp"

#include "fdrlab/bh.hpp"
#include "fdrlab/calibrate.hpp"
#include "fdrlab/parallel.hpp"
#include "fdrlab/tstats.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace fdrlab {

namespace {

double round_half_up(double x) { return std::floor(x + 0.5); }

double mean_shift(ModelId id) {
  switch (id) {
    case ModelId::Exp1: return 1.0;
    case ModelId::Gamma05: return 0.5;
    case ModelId::T4: return 0.0;
    case ModelId::LogNormalDiff: return 0.0;
  }
  return 0.0;
}

double draw_noise(ModelId id, RandomStream& s) {
  switch (id) {
    case ModelId::Exp1:
      return s.exponential();
    case ModelId::Gamma05: {
      // Gamma(1/2, 1) = Z^2 / 2
      const double z = s.normal();
      return 0.5 * z * z;
    }
    case ModelId::T4: {
      // Z / sqrt(V/4), V ~ chi^2_4 = 2(E1 + E2)
      const double z = s.normal();
      const double v = 2.0 * (s.exponential() + s.exponential());
      return z / std::sqrt(v / 4.0);
    }
    case ModelId::LogNormalDiff:
      return std::exp(s.normal()) - std::exp(s.normal());
  }
  return 0.0;
}

std::uint64_t cell_key(const ModelSpec& model) {
  if (model.n >= (Index{1} << 28) || model.m >= (Index{1} << 28)) {
    throw ValidationError("cell dimensions exceed the stream-id encoding");
  }
  return (static_cast<std::uint64_t>(model.id) << 56) |
         (static_cast<std::uint64_t>(model.n) << 28) |
         static_cast<std::uint64_t>(model.m);
}

struct RepSlot {
  double fdp = 0.0;
  double power = 0.0;
  double threshold = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

std::string model_name(ModelId id) {
  switch (id) {
    case ModelId::Exp1: return "exp1";
    case ModelId::Gamma05: return "gamma05";
    case ModelId::T4: return "t4";
    case ModelId::LogNormalDiff: return "lognormdiff";
  }
  return "?";
}

ModelSpec ModelSpec::make(ModelId id, Index n, Index m) {
  if (n < 2 || m < 1) throw ValidationError("model needs n >= 2 and m >= 1");
  ModelSpec spec;
  spec.id = id;
  spec.n = n;
  spec.m = m;
  const double rate = std::sqrt(std::log(static_cast<double>(m)) /
                                static_cast<double>(n));
  switch (id) {
    case ModelId::Exp1:
      spec.sigma = 1.0;
      spec.m1 = static_cast<Index>(round_half_up(0.05 * static_cast<double>(m)));
      spec.mu_alt = 2.0 * spec.sigma * rate;
      break;
    case ModelId::Gamma05:
      spec.sigma = std::sqrt(0.5);
      spec.m1 = static_cast<Index>(round_half_up(0.05 * static_cast<double>(m)));
      spec.mu_alt = 4.0 * spec.sigma * rate;
      break;
    case ModelId::T4:
      spec.sigma = std::sqrt(2.0);
      spec.m1 = static_cast<Index>(round_half_up(0.1 * static_cast<double>(m)));
      spec.mu_alt = 2.0 * rate;
      break;
    case ModelId::LogNormalDiff:
      spec.sigma = std::sqrt(2.0 * (std::exp(2.0) - std::exp(1.0)));
      spec.m1 = static_cast<Index>(round_half_up(0.1 * static_cast<double>(m)));
      spec.mu_alt = 4.0 * rate;
      break;
  }
  spec.m1 = std::min(spec.m1, m);
  return spec;
}

GenerateResult generate(const ModelSpec& spec, const RandomStream& rng) {
  Matrix values(spec.n, spec.m);
  Vector mu = Vector::Zero(spec.m);
  mu.head(spec.m1).setConstant(spec.mu_alt);
  const double shift = mean_shift(spec.id);
  for (Index i = 0; i < spec.m; ++i) {
    RandomStream column_stream = rng.split(static_cast<std::uint64_t>(i));
    for (Index k = 0; k < spec.n; ++k) {
      values(k, i) = mu[i] + (draw_noise(spec.id, column_stream) - shift);
    }
  }
  return GenerateResult{DataMatrix{std::move(values)},
                        GroundTruth::from_means(std::move(mu))};
}

std::vector<CellAggregate> run_cell(const CellRequest& request) {
  const ModelSpec& model = request.model;
  if (request.replications < 1) throw ValidationError("replications must be >= 1");
  if (request.alphas.empty() || request.methods.empty()) {
    throw ValidationError("cell needs at least one alpha and one method");
  }
  for (double a : request.alphas) {
    if (!(a > 0.0 && a < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  }

  const auto t_start = std::chrono::steady_clock::now();
  const Index reps = request.replications;
  const std::size_t n_alpha = request.alphas.size();
  const std::size_t n_method = request.methods.size();
  const std::size_t slots_per_rep = n_alpha * n_method;
  std::vector<RepSlot> slots(static_cast<std::size_t>(reps) * slots_per_rep);

  const std::uint64_t key = cell_key(model);

  detail::parallel_for(reps, request.threads, [&](std::int64_t r) {
    RandomStream rep_stream =
        make_rng_stream(request.seed, key).split(static_cast<std::uint64_t>(r));
    const RandomStream gen_stream = rep_stream.split(0);
    const RandomStream calib_stream = rep_stream.split(1);

    const GenerateResult gen = generate(model, gen_stream);
    const TestStatVector stats = t_statistics(gen.data);
    const Vector abs_t = stats.t.cwiseAbs();

    for (std::size_t mi = 0; mi < n_method; ++mi) {
      PValueVector pvals;
      switch (request.methods[mi]) {
        case Calibration::Normal:
          pvals = pvals_normal(stats);
          break;
        case Calibration::StudentT:
          pvals = pvals_student_t(stats, model.n);
          break;
        case Calibration::Bootstrap: {
          const auto ecdf =
              bootstrap_pooled_ecdf(gen.data, request.resamples, calib_stream);
          pvals = pvals_bootstrap(stats, ecdf);
          break;
        }
        case Calibration::RegularizedBootstrap: {
          const TruncationPlan plan =
              request.lambda_mode.kind == LambdaMode::Kind::CrossValidated
                  ? cv_select_lambda(gen.data, default_cv_grid(gen.data))
                  : fixed_rate_lambda(gen.data, request.lambda_mode.rate_c);
          pvals = pvals_regularized_bootstrap(gen.data, plan, request.resamples,
                                              calib_stream, stats);
          break;
        }
      }
      for (std::size_t ai = 0; ai < n_alpha; ++ai) {
        const BHResult bh = bh_stepup(pvals, request.alphas[ai]);
        const ErrorMetrics metrics = score(bh, gen.truth);
        RepSlot& slot = slots[static_cast<std::size_t>(r) * slots_per_rep +
                              mi * n_alpha + ai];
        slot.fdp = metrics.FDP;
        slot.power = metrics.power;
        if (bh.R > 0) {
          double smallest = std::numeric_limits<double>::infinity();
          for (Index idx : bh.rejected) smallest = std::min(smallest, abs_t[idx]);
          slot.threshold = smallest;
        }
      }
    }
  });

  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
          .count();

  // Aggregation runs serially in replication order, so the report does not
  // depend on the worker count.
  std::vector<CellAggregate> out;
  out.reserve(slots_per_rep);
  for (std::size_t mi = 0; mi < n_method; ++mi) {
    for (std::size_t ai = 0; ai < n_alpha; ++ai) {
      detail::CompensatedSum fdp_sum, power_sum, thr_sum;
      Index thr_reps = 0;
      for (Index r = 0; r < reps; ++r) {
        const RepSlot& slot =
            slots[static_cast<std::size_t>(r) * slots_per_rep + mi * n_alpha + ai];
        fdp_sum.add(slot.fdp);
        power_sum.add(slot.power);
        if (!std::isnan(slot.threshold)) {
          thr_sum.add(slot.threshold);
          ++thr_reps;
        }
      }
      CellAggregate agg;
      agg.alpha = request.alphas[ai];
      agg.method = request.methods[mi];
      agg.fdr = fdp_sum.value() / static_cast<double>(reps);
      agg.power = power_sum.value() / static_cast<double>(reps);
      if (reps > 1) {
        detail::CompensatedSum fdp_var, power_var;
        for (Index r = 0; r < reps; ++r) {
          const RepSlot& slot =
              slots[static_cast<std::size_t>(r) * slots_per_rep + mi * n_alpha + ai];
          fdp_var.add((slot.fdp - agg.fdr) * (slot.fdp - agg.fdr));
          power_var.add((slot.power - agg.power) * (slot.power - agg.power));
        }
        const double denom = static_cast<double>(reps - 1);
        agg.fdr_se = std::sqrt(fdp_var.value() / denom / static_cast<double>(reps));
        agg.power_se =
            std::sqrt(power_var.value() / denom / static_cast<double>(reps));
      }
      agg.mean_threshold =
          thr_reps > 0 ? thr_sum.value() / static_cast<double>(thr_reps) : 0.0;
      agg.threshold_reps = thr_reps;
      agg.seconds = seconds;
      out.push_back(agg);
    }
  }
  return out;
}

SimRow run_experiment(const ModelSpec& model, const RunConfig& config,
                      Index replications, int threads) {
  config.validate();
  CellRequest request;
  request.model = model;
  request.alphas = {config.alpha};
  request.methods = {config.calibration};
  request.replications = replications;
  request.seed = config.seed;
  request.resamples = config.bootstrap_resamples;
  request.lambda_mode = config.lambda_mode;
  request.threads = threads;
  const auto agg = run_cell(request).front();
  SimRow row;
  row.model = model.id;
  row.n = model.n;
  row.m = model.m;
  row.alpha = agg.alpha;
  row.method = agg.method;
  row.fdr = agg.fdr;
  row.power = agg.power;
  row.fdr_se = agg.fdr_se;
  row.power_se = agg.power_se;
  row.replications = replications;
  row.seconds = agg.seconds;
  return row;
}

namespace {

template <typename T>
std::vector<T> dedup_keep_order(const std::vector<T>& in) {
  std::vector<T> out;
  for (const T& v : in) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  }
  return out;
}

}  // namespace

SimReport run_grid(const GridSpec& grid, Index replications, std::uint64_t seed,
                   int resamples, LambdaMode lambda_mode, int threads) {
  if (grid.models.empty() || grid.n_values.empty() || grid.m_values.empty() ||
      grid.alphas.empty() || grid.methods.empty()) {
    throw ValidationError("grid lists must be nonempty");
  }
  const auto models = dedup_keep_order(grid.models);
  const auto n_values = dedup_keep_order(grid.n_values);
  const auto m_values = dedup_keep_order(grid.m_values);
  const auto alphas = dedup_keep_order(grid.alphas);
  const auto methods = dedup_keep_order(grid.methods);

  SimReport report;
  for (ModelId model_id : models) {
    for (Index n : n_values) {
      for (Index m : m_values) {
        CellRequest request;
        request.model = ModelSpec::make(model_id, n, m);
        request.alphas = alphas;
        request.methods = methods;
        request.replications = replications;
        request.seed = seed;
        request.resamples = resamples;
        request.lambda_mode = lambda_mode;
        request.threads = threads;
        const auto aggregates = run_cell(request);
        // run_cell is method-major; rows are ordered (alpha, method).
        for (std::size_t ai = 0; ai < alphas.size(); ++ai) {
          for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const auto& agg = aggregates[mi * alphas.size() + ai];
            SimRow row;
            row.model = model_id;
            row.n = n;
            row.m = m;
            row.alpha = agg.alpha;
            row.method = agg.method;
            row.fdr = agg.fdr;
            row.power = agg.power;
            row.fdr_se = agg.fdr_se;
            row.power_se = agg.power_se;
            row.replications = replications;
            row.seconds = agg.seconds;
            report.rows.push_back(row);
          }
        }
      }
    }
  }
  return report;
}

}  // namespace fdrlab
