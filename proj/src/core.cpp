#include "fdrlab/core.hpp"

#include <cmath>

namespace fdrlab {

DataMatrix validate_matrix(Matrix raw) {
  if (raw.rows() < 2) throw TooFewSamplesError(raw.rows());
  if (raw.cols() < 1) throw ValidationError("matrix has no columns");
  for (Index j = 0; j < raw.cols(); ++j) {
    for (Index i = 0; i < raw.rows(); ++i) {
      if (!std::isfinite(raw(i, j))) throw NonFiniteEntryError(i, j);
    }
  }
  return DataMatrix{std::move(raw)};
}

GroundTruth GroundTruth::from_means(Vector mu_values) {
  GroundTruth truth;
  truth.is_null.resize(mu_values.size());
  for (Index i = 0; i < mu_values.size(); ++i) {
    truth.is_null[i] = (mu_values[i] == 0.0);
    if (!truth.is_null[i]) ++truth.alt_count;
  }
  truth.mu = std::move(mu_values);
  return truth;
}

std::string calibration_name(Calibration c) {
  switch (c) {
    case Calibration::Normal: return "normal";
    case Calibration::StudentT: return "t";
    case Calibration::Bootstrap: return "boot";
    case Calibration::RegularizedBootstrap: return "regboot";
  }
  return "?";
}

void RunConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must lie in (0, 1)");
  }
  if (bootstrap_resamples < 1) {
    throw ValidationError("bootstrap resample count must be >= 1");
  }
  if (lambda_mode.kind == LambdaMode::Kind::FixedRate && !(lambda_mode.rate_c > 0.0)) {
    throw ValidationError("fixed-rate lambda constant must be positive");
  }
}

}  // namespace fdrlab
