#pragma once

// Batch front-end: experiment configuration files, table generation and
// rendering, and one-off fits on a data file.
//
// Config files are "key = value" lines; '#' starts a comment. Keys:
//   family      exponential | rayleigh | burr | exppoly
//   theta0      list of parameters, e.g. "0.5, 2" or "(0.8, 2), (2, 5)"
//   n           list of sample sizes
//   estimators  list of ids (ml, mse, cvm, mom, am, sm, nce, stein, stein(a))
//   a           tuning values that a bare "stein" expands to
//   reps        replications per cell (default 10000)
//   seed        64-bit seed (default 1)
//   format      csv | md | json (default csv)
//   name        prefix for output files (default "experiment")

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "smde/montecarlo.hpp"

namespace smde::cli {

enum class Format { Csv, Markdown, Json };

Format format_from_string(std::string_view s);  // throws ConfigError
std::string_view to_string(Format f) noexcept;

struct ExperimentConfig {
  std::string name = "experiment";
  Family family = Family::Exponential;
  std::vector<ParamVector> theta0;
  std::vector<std::size_t> n;
  std::vector<EstimatorSpec> estimators;  // Stein already expanded over the a-list
  std::size_t reps = 10000;
  std::uint64_t seed = 1;
  Format format = Format::Csv;

  /// Throws ConfigError if any list is empty or an estimator does not apply.
  void validate() const;
};

/// Throws ConfigError with the 1-based line and the offending key.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

/// Built-in experiments: table 1-2 exponential, 3-4 Rayleigh, 5-6 Burr,
/// 7-8 exp-poly. Odd numbers are bias tables, even numbers MSE tables of the
/// same experiment. Throws ConfigError for other numbers.
ExperimentConfig builtin_table(int table);

struct Experiment {
  ExperimentConfig config;
  std::vector<McSummary> cells;  // row-major: theta0, n, estimator
};

/// Runs every (theta0, n, estimator) cell. Each cell uses the config seed, so
/// a cell's result does not depend on which other cells are in the config.
Experiment run_experiment(const ExperimentConfig& cfg, const RunOptions& opts = {});

enum class Measure { Bias, Mse };

/// Wide table: one row per (theta0, n) and parameter coordinate, one column
/// per estimator, then a provenance footer. CSV uses 17 significant digits,
/// Markdown 4 decimals.
std::string render_table(const Experiment& e, Measure m, Format f);
/// Both tables plus every cell in one JSON document.
std::string render_json(const Experiment& e);

/// Long format, one line per cell, exact to 17 significant digits.
std::string render_cells_csv(const std::vector<McSummary>& cells);
/// Inverse of render_cells_csv. Throws ConfigError on malformed input.
std::vector<McSummary> parse_cells_csv(std::istream& in);

std::string provenance(const ExperimentConfig& cfg);
const char* version() noexcept;

/// One positive real per line; blank lines are skipped.
/// Throws DataError("line N: ...") on the first bad line.
std::vector<double> read_data(std::istream& in);

/// Fits once and renders the report as a single JSON object.
std::string fit_once_json(Family family, const std::vector<double>& data, const EstimatorSpec& spec,
                          std::uint64_t seed = 0);

}  // namespace smde::cli
