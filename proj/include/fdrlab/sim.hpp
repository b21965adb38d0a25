#pragma once

#include "fdrlab/core.hpp"
#include "fdrlab/rng.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdrlab {

enum class ModelId { Exp1, Gamma05, T4, LogNormalDiff };

std::string model_name(ModelId id);

/// One simulation scenario: dimension, sample size, and the derived
/// alternative mean and noise scale.
struct ModelSpec {
  ModelId id = ModelId::Exp1;
  Index n = 0;
  Index m = 0;
  Index m1 = 0;       // alternative count
  double mu_alt = 0;  // mean of the first m1 variables
  double sigma = 0;   // sd of the centered noise

  /// Derives m1, mu_alt and sigma from (id, n, m):
  ///   Exp1:          sigma = 1,        m1 = round(0.05 m), mu = 2 sigma sqrt(log m / n)
  ///   Gamma05:       sigma = sqrt(.5), m1 = round(0.05 m), mu = 4 sigma sqrt(log m / n)
  ///   T4:            sigma = sqrt(2),  m1 = round(0.1 m),  mu = 2 sqrt(log m / n)
  ///   LogNormalDiff: sigma = sqrt(2(e^2 - e)), m1 = round(0.1 m), mu = 4 sqrt(log m / n)
  /// Rounding is half-up.
  static ModelSpec make(ModelId id, Index n, Index m);
};

struct GenerateResult {
  DataMatrix data;
  GroundTruth truth;
};

/// n i.i.d. rows; entry (k, i) = mu_i + (eps - E eps) with eps from the
/// model's law. Column i draws from rng.split(i), so for a fixed stream the
/// first columns are shared between runs with different m.
GenerateResult generate(const ModelSpec& spec, const RandomStream& rng);

struct SimRow {
  ModelId model = ModelId::Exp1;
  Index n = 0;
  Index m = 0;
  double alpha = 0.0;
  Calibration method = Calibration::Normal;
  double fdr = 0.0;
  double power = 0.0;
  double fdr_se = 0.0;
  double power_se = 0.0;
  Index replications = 0;
  double seconds = 0.0;
};

struct SimReport {
  std::vector<SimRow> rows;
};

/// All (alpha, method) pairs evaluated on one stream of replicated datasets;
/// every method within a replication sees the same generated matrix.
struct CellRequest {
  ModelSpec model;
  std::vector<double> alphas;
  std::vector<Calibration> methods;
  Index replications = 1;
  std::uint64_t seed = 0;
  int resamples = 200;
  LambdaMode lambda_mode = LambdaMode::cross_validated();
  int threads = 1;
};

struct CellAggregate {
  double alpha = 0.0;
  Calibration method = Calibration::Normal;
  double fdr = 0.0;
  double power = 0.0;
  double fdr_se = 0.0;
  double power_se = 0.0;
  /// Mean over replications (with at least one rejection) of the smallest
  /// rejected |T_i|, the realized testing threshold.
  double mean_threshold = 0.0;
  Index threshold_reps = 0;
  double seconds = 0.0;
};

/// The Monte Carlo engine behind run_experiment and run_grid. Replication r
/// draws from make_rng_stream(seed, cell_key(model)).split(r); results are
/// bit-identical for any thread count.
std::vector<CellAggregate> run_cell(const CellRequest& request);

/// One (model, alpha, method) cell, replicated; empirical FDR/power with
/// Monte Carlo standard errors (sample sd / sqrt(replications)).
SimRow run_experiment(const ModelSpec& model, const RunConfig& config,
                      Index replications, int threads = 1);

struct GridSpec {
  std::vector<ModelId> models;
  std::vector<Index> n_values;
  std::vector<Index> m_values;
  std::vector<double> alphas;
  std::vector<Calibration> methods;
};

/// Full factorial sweep, rows ordered (model, n, m, alpha, method) in the
/// order the lists supply them (duplicates removed). Within a cell all
/// methods and alphas are evaluated on the same replicated datasets.
SimReport run_grid(const GridSpec& grid, Index replications, std::uint64_t seed,
                   int resamples, LambdaMode lambda_mode, int threads = 1);

}  // namespace fdrlab
