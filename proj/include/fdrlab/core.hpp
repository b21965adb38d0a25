#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdrlab {

using Matrix = Eigen::MatrixXd;  // column-major: rows = samples, cols = variables
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Input rejected before any computation (bad matrix, bad config, bad file).
class ValidationError : public Error {
  using Error::Error;
};

class NonFiniteEntryError final : public ValidationError {
 public:
  NonFiniteEntryError(Index row, Index col)
      : ValidationError("non-finite entry at row " + std::to_string(row) +
                        ", column " + std::to_string(col)),
        row_(row),
        col_(col) {}
  Index row() const { return row_; }
  Index col() const { return col_; }

 private:
  Index row_;
  Index col_;
};

class TooFewSamplesError final : public ValidationError {
 public:
  explicit TooFewSamplesError(Index n)
      : ValidationError("need at least 2 samples, got " + std::to_string(n)),
        n_(n) {}
  Index samples() const { return n_; }

 private:
  Index n_;
};

/// A column with zero sample variance where a t statistic or skewness is needed.
class DegenerateColumnError : public Error {
 public:
  explicit DegenerateColumnError(Index column, const std::string& context = "")
      : Error("degenerate (constant) column " + std::to_string(column) +
              (context.empty() ? "" : ": " + context)),
        column_(column) {}
  Index column() const { return column_; }

 private:
  Index column_;
};

class AllTruncatedError final : public Error {
 public:
  explicit AllTruncatedError(Index column)
      : Error("truncation left column " + std::to_string(column) + " constant"),
        column_(column) {}
  Index column() const { return column_; }

 private:
  Index column_;
};

class EmptyGridError final : public Error {
 public:
  EmptyGridError() : Error("empty candidate grid") {}
};

class DomainError final : public Error {
  using Error::Error;
};

class NotBracketedError final : public Error {
  using Error::Error;
};

class DimensionMismatchError final : public Error {
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// n samples by m variables, every entry finite, n >= 2.
/// Construct through validate_matrix for external data; internal generators
/// that produce finite values by construction may fill it directly.
struct DataMatrix {
  Matrix values;

  Index samples() const { return values.rows(); }
  Index variables() const { return values.cols(); }
  auto column(Index i) const { return values.col(i); }
};

/// Checks n >= 2, m >= 1 and finiteness of every entry.
DataMatrix validate_matrix(Matrix raw);

/// True means with the implied null set H0 = {i : mu_i == 0}.
struct GroundTruth {
  Vector mu;
  std::vector<bool> is_null;  // is_null[i] == (mu[i] == 0)
  Index alt_count = 0;        // m1 = m - |H0|

  static GroundTruth from_means(Vector mu_values);
  Index size() const { return mu.size(); }
};

enum class Calibration { Normal, StudentT, Bootstrap, RegularizedBootstrap };

std::string calibration_name(Calibration c);

/// How the truncation level is chosen for the regularized bootstrap.
struct LambdaMode {
  enum class Kind { FixedRate, CrossValidated };
  Kind kind = Kind::CrossValidated;
  double rate_c = 1.0;  // FixedRate only

  static LambdaMode fixed_rate(double c = 1.0) {
    return LambdaMode{Kind::FixedRate, c};
  }
  static LambdaMode cross_validated() {
    return LambdaMode{Kind::CrossValidated, 1.0};
  }
};

struct RunConfig {
  double alpha = 0.1;
  Calibration calibration = Calibration::Normal;
  int bootstrap_resamples = 200;  // N
  LambdaMode lambda_mode = LambdaMode::cross_validated();
  std::uint64_t seed = 0;

  void validate() const;
};

}  // namespace fdrlab
