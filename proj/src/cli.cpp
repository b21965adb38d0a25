#include "fdrlab/cli.hpp"

#include "fdrlab/bh.hpp"
#include "fdrlab/calibrate.hpp"
#include "fdrlab/dist.hpp"
#include "fdrlab/rng.hpp"
#include "fdrlab/sim.hpp"
#include "fdrlab/tstats.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

namespace fdrlab::cli {

namespace {

std::string fmt_num(double v, bool raw) {
  char buf[40];
  std::snprintf(buf, sizeof buf, raw ? "%.17g" : "%.6g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream stream(s);
  std::string field;
  while (std::getline(stream, field, sep)) out.push_back(field);
  if (!s.empty() && s.back() == sep) out.push_back("");
  return out;
}

std::optional<double> parse_double(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  double value = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end) return std::nullopt;
  return value;
}

Calibration parse_method(const std::string& name) {
  if (name == "normal") return Calibration::Normal;
  if (name == "t") return Calibration::StudentT;
  if (name == "boot") return Calibration::Bootstrap;
  if (name == "regboot") return Calibration::RegularizedBootstrap;
  throw ConfigError("unknown method '" + name + "' (want normal|t|boot|regboot)");
}

ModelId parse_model(const std::string& name) {
  if (name == "exp1") return ModelId::Exp1;
  if (name == "gamma05") return ModelId::Gamma05;
  if (name == "t4") return ModelId::T4;
  if (name == "lognormdiff") return ModelId::LogNormalDiff;
  throw ConfigError("unknown model '" + name +
                    "' (want exp1|gamma05|t4|lognormdiff)");
}

LambdaMode parse_lambda_mode(const std::string& text) {
  if (text == "cv") return LambdaMode::cross_validated();
  if (text == "rate") return LambdaMode::fixed_rate(1.0);
  if (text.rfind("rate:", 0) == 0) {
    const auto c = parse_double(text.substr(5));
    if (!c || !(*c > 0.0)) throw ConfigError("bad rate constant in '" + text + "'");
    return LambdaMode::fixed_rate(*c);
  }
  throw ConfigError("unknown lambda mode '" + text + "' (want cv or rate:<c>)");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open output file '" + path + "'");
  return out;
}

// ---------------------------------------------------------------------------
// test
// ---------------------------------------------------------------------------

struct TestOptions {
  std::string input;
  std::string output;
  std::string method = "normal";
  double alpha = 0.1;
  int resamples = 200;
  std::string lambda = "cv";
  std::uint64_t seed = 0;
  int threads = 0;
  bool raw = false;
};

int cmd_test(const TestOptions& opt) {
  const CsvMatrix csv = read_csv_matrix(opt.input);
  const DataMatrix data = validate_matrix(csv.values);
  const Calibration method = parse_method(opt.method);
  const LambdaMode lambda_mode = parse_lambda_mode(opt.lambda);
  if (!(opt.alpha > 0.0 && opt.alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
  const int threads = resolve_threads(opt.threads);

  const TestStatVector stats = t_statistics(data);
  const RandomStream calib_stream = make_rng_stream(opt.seed, 0);
  PValueVector pvals;
  switch (method) {
    case Calibration::Normal:
      pvals = pvals_normal(stats);
      break;
    case Calibration::StudentT:
      pvals = pvals_student_t(stats, data.samples());
      break;
    case Calibration::Bootstrap: {
      const auto ecdf =
          bootstrap_pooled_ecdf(data, opt.resamples, calib_stream, threads);
      pvals = pvals_bootstrap(stats, ecdf);
      break;
    }
    case Calibration::RegularizedBootstrap: {
      const TruncationPlan plan =
          lambda_mode.kind == LambdaMode::Kind::CrossValidated
              ? cv_select_lambda(data, default_cv_grid(data))
              : fixed_rate_lambda(data, lambda_mode.rate_c);
      pvals = pvals_regularized_bootstrap(data, plan, opt.resamples,
                                          calib_stream, stats, threads);
      break;
    }
  }
  const BHResult bh = bh_stepup(pvals, opt.alpha);

  std::vector<bool> rejected(static_cast<std::size_t>(data.variables()), false);
  for (Index i : bh.rejected) rejected[static_cast<std::size_t>(i)] = true;

  auto out = open_output(opt.output);
  out << "# fdrlab test report\n";
  out << "# method," << calibration_name(method) << "\n";
  out << "# n," << data.samples() << "\n";
  out << "# m," << data.variables() << "\n";
  out << "# alpha," << fmt_num(opt.alpha, opt.raw) << "\n";
  if (method == Calibration::Bootstrap ||
      method == Calibration::RegularizedBootstrap) {
    out << "# resamples," << opt.resamples << "\n";
  }
  if (method == Calibration::RegularizedBootstrap) {
    out << "# lambda," << opt.lambda << "\n";
    if (!std::isnan(pvals.meta.lambda_scalar)) {
      out << "# lambda_hat," << fmt_num(pvals.meta.lambda_scalar, opt.raw) << "\n";
    }
  }
  out << "# k_hat," << bh.k_hat << "\n";
  out << "# R," << bh.R << "\n";
  out << "# p_threshold," << fmt_num(bh.p_threshold, opt.raw) << "\n";
  out << "index,t,p,rejected\n";
  for (Index i = 0; i < data.variables(); ++i) {
    out << (i + 1) << ',' << fmt_num(stats.t[i], opt.raw) << ','
        << fmt_num(pvals.p[i], opt.raw) << ','
        << (rejected[static_cast<std::size_t>(i)] ? 1 : 0) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOptions {
  std::string config;
  std::string output;
  int threads = 0;
  bool raw = false;
  bool timing = false;
  // flag overrides; negative/empty means "use the config file value"
  long long reps_override = -1;
  long long seed_override = -1;
  long long resamples_override = -1;
};

struct SimulateConfig {
  GridSpec grid;
  Index replications = 500;
  std::uint64_t seed = 0;
  int resamples = 200;
  LambdaMode lambda_mode = LambdaMode::cross_validated();
};

SimulateConfig read_simulate_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  SimulateConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    auto values = split(value, ',');
    for (auto& v : values) v = trim(v);
    auto as_count = [&](const std::string& what) -> long long {
      const auto num = parse_double(value);
      if (!num || *num < 0 || *num != std::floor(*num)) {
        throw ConfigError("config line " + std::to_string(lineno) + ": bad " + what);
      }
      return static_cast<long long>(*num);
    };
    if (key == "models") {
      for (const auto& v : values) cfg.grid.models.push_back(parse_model(v));
    } else if (key == "n") {
      for (const auto& v : values) {
        const auto num = parse_double(v);
        if (!num || *num < 2) throw ConfigError("config line " + std::to_string(lineno) + ": bad n");
        cfg.grid.n_values.push_back(static_cast<Index>(*num));
      }
    } else if (key == "m") {
      for (const auto& v : values) {
        const auto num = parse_double(v);
        if (!num || *num < 1) throw ConfigError("config line " + std::to_string(lineno) + ": bad m");
        cfg.grid.m_values.push_back(static_cast<Index>(*num));
      }
    } else if (key == "alpha") {
      for (const auto& v : values) {
        const auto num = parse_double(v);
        if (!num || !(*num > 0.0 && *num < 1.0)) {
          throw ConfigError("config line " + std::to_string(lineno) + ": bad alpha");
        }
        cfg.grid.alphas.push_back(*num);
      }
    } else if (key == "methods") {
      for (const auto& v : values) cfg.grid.methods.push_back(parse_method(v));
    } else if (key == "reps") {
      cfg.replications = static_cast<Index>(as_count("reps"));
    } else if (key == "resamples") {
      cfg.resamples = static_cast<int>(as_count("resamples"));
    } else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(as_count("seed"));
    } else if (key == "lambda") {
      cfg.lambda_mode = parse_lambda_mode(value);
    } else {
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
    }
  }
  if (cfg.grid.models.empty() || cfg.grid.n_values.empty() ||
      cfg.grid.m_values.empty() || cfg.grid.alphas.empty() ||
      cfg.grid.methods.empty()) {
    throw ConfigError("config must set models, n, m, alpha and methods");
  }
  if (cfg.replications < 1) throw ConfigError("reps must be >= 1");
  if (cfg.resamples < 1) throw ConfigError("resamples must be >= 1");
  return cfg;
}

int cmd_simulate(const SimulateOptions& opt) {
  SimulateConfig cfg = read_simulate_config(opt.config);
  if (opt.reps_override >= 1) cfg.replications = static_cast<Index>(opt.reps_override);
  if (opt.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(opt.seed_override);
  if (opt.resamples_override >= 1) cfg.resamples = static_cast<int>(opt.resamples_override);

  const SimReport report =
      run_grid(cfg.grid, cfg.replications, cfg.seed, cfg.resamples,
               cfg.lambda_mode, resolve_threads(opt.threads));

  auto out = open_output(opt.output);
  out << "model,n,m,alpha,method,fdr,power,fdr_se,power_se,reps,seconds\n";
  for (const SimRow& row : report.rows) {
    // Wall time is left at zero unless requested, so reruns of the same
    // config produce byte-identical files.
    const double seconds = opt.timing ? row.seconds : 0.0;
    out << model_name(row.model) << ',' << row.n << ',' << row.m << ','
        << fmt_num(row.alpha, opt.raw) << ',' << calibration_name(row.method)
        << ',' << fmt_num(row.fdr, opt.raw) << ',' << fmt_num(row.power, opt.raw)
        << ',' << fmt_num(row.fdr_se, opt.raw) << ','
        << fmt_num(row.power_se, opt.raw) << ',' << row.replications << ','
        << fmt_num(seconds, opt.raw) << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// lambda
// ---------------------------------------------------------------------------

struct LambdaOptions {
  std::string input;
  std::string output;
  int grid_points = 30;
  bool raw = false;
};

int cmd_lambda(const LambdaOptions& opt) {
  const CsvMatrix csv = read_csv_matrix(opt.input);
  const DataMatrix data = validate_matrix(csv.values);
  if (opt.grid_points < 1) throw ConfigError("grid-points must be >= 1");
  const auto grid = default_cv_grid(data, opt.grid_points);
  CvCurve curve;
  cv_select_lambda(data, grid, &curve);

  auto out = open_output(opt.output);
  out << "# lambda_hat," << fmt_num(curve.lambda_hat, opt.raw) << "\n";
  out << "# skipped_columns," << curve.skipped_columns << "\n";
  out << "lambda,risk,selected\n";
  for (std::size_t i = 0; i < curve.lambda.size(); ++i) {
    out << fmt_num(curve.lambda[i], opt.raw) << ','
        << fmt_num(curve.risk[i], opt.raw) << ','
        << (curve.lambda[i] == curve.lambda_hat ? 1 : 0) << "\n";
  }
  return kExitOk;
}

}  // namespace

CsvMatrix read_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file '" + path + "'");
  CsvMatrix result;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  std::size_t width = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto fields = split(line, ',');
    if (lineno == 1) {
      // Header auto-detection: any non-numeric cell in the first row.
      bool numeric = true;
      for (const auto& f : fields) {
        if (!parse_double(f)) numeric = false;
      }
      if (!numeric) {
        result.had_header = true;
        for (const auto& f : fields) result.header.push_back(trim(f));
        width = fields.size();
        continue;
      }
    }
    if (width == 0) width = fields.size();
    if (fields.size() != width) {
      throw CsvParseError(lineno, fields.size(),
                          "expected " + std::to_string(width) + " fields, got " +
                              std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const auto value = parse_double(fields[c]);
      if (!value) {
        throw CsvParseError(lineno, c + 1,
                            "cell '" + trim(fields[c]) + "' is not a number");
      }
      row.push_back(*value);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ValidationError("input file has no data rows");
  result.values.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      result.values(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    }
  }
  return result;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Large-scale t testing with FDR control"};
  app.require_subcommand(1);

  TestOptions test_opt;
  auto* test = app.add_subcommand("test", "run multiple t tests on a CSV matrix");
  test->add_option("--input", test_opt.input, "CSV matrix, rows = samples")->required();
  test->add_option("--output", test_opt.output, "report file")->required();
  test->add_option("--method", test_opt.method, "normal|t|boot|regboot");
  test->add_option("--alpha", test_opt.alpha, "target FDR level");
  test->add_option("--resamples", test_opt.resamples, "bootstrap resamples N");
  test->add_option("--lambda", test_opt.lambda, "cv or rate:<c>");
  test->add_option("--seed", test_opt.seed, "RNG seed");
  test->add_option("--threads", test_opt.threads, "worker threads (0 = auto)");
  test->add_flag("--raw", test_opt.raw, "full-precision output");

  SimulateOptions sim_opt;
  auto* sim = app.add_subcommand("simulate", "run a simulation grid");
  sim->add_option("--config", sim_opt.config, "grid config file")->required();
  sim->add_option("--output", sim_opt.output, "report CSV")->required();
  sim->add_option("--threads", sim_opt.threads, "worker threads (0 = auto)");
  sim->add_option("--reps", sim_opt.reps_override, "override replication count");
  sim->add_option("--seed", sim_opt.seed_override, "override seed");
  sim->add_option("--resamples", sim_opt.resamples_override, "override N");
  sim->add_flag("--raw", sim_opt.raw, "full-precision output");
  sim->add_flag("--timing", sim_opt.timing, "emit wall time per row");

  LambdaOptions lambda_opt;
  auto* lam = app.add_subcommand("lambda", "cross-validation risk curve");
  lam->add_option("--input", lambda_opt.input, "CSV matrix")->required();
  lam->add_option("--output", lambda_opt.output, "curve CSV")->required();
  lam->add_option("--grid-points", lambda_opt.grid_points, "candidate count");
  lam->add_flag("--raw", lambda_opt.raw, "full-precision output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "fdrlab: error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (test->parsed()) return cmd_test(test_opt);
    if (sim->parsed()) return cmd_simulate(sim_opt);
    if (lam->parsed()) return cmd_lambda(lambda_opt);
    std::cerr << "fdrlab: error: no subcommand\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "fdrlab: error: " << e.what() << "\n";
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "fdrlab: error: " << e.what() << "\n";
    return kExitNumeric;
  }
}

}  // namespace fdrlab::cli
