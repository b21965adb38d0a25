#pragma once

#include "fdrlab/core.hpp"

#include <string>
#include <vector>

namespace fdrlab::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;    // parse / validation / config
inline constexpr int kExitNumeric = 3;  // degeneracy / numeric failure

class CsvParseError final : public ValidationError {
 public:
  CsvParseError(std::size_t line, std::size_t column, const std::string& what)
      : ValidationError("line " + std::to_string(line) + ", column " +
                        std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ConfigError final : public ValidationError {
  using ValidationError::ValidationError;
};

struct CsvMatrix {
  Matrix values;  // rows = samples, columns = variables
  bool had_header = false;
  std::vector<std::string> header;
};

/// CSV with one sample per row; a non-numeric first row is taken as a header.
CsvMatrix read_csv_matrix(const std::string& path);

/// Entry point used by the fdrlab binary; returns the process exit code and
/// never throws.
int run_cli(int argc, const char* const* argv);

}  // namespace fdrlab::cli
