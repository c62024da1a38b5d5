// Command-line front-end: fit, tables, bench.
//
// Exit codes: 0 success, 1 configuration or input error, 2 runtime failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "smde/cli.hpp"
#include "smde/error.hpp"
#include "smde/kernels.hpp"

namespace fs = std::filesystem;
using namespace smde;

namespace {

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

void write_file(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << body;
  if (!out) throw Error("write failed for '" + path.string() + "'");
  std::cout << path.string() << "\n";
}

struct TablesArgs {
  std::optional<int> table;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> reps;
  std::optional<std::string> format;
  std::string out;
  unsigned threads = 0;
  bool full = false;
};

int run_tables(const TablesArgs& args) {
  cli::ExperimentConfig cfg =
      args.table ? cli::builtin_table(*args.table) : cli::load_config(args.config);
  if (args.full) cfg.reps = 100000;
  if (args.reps) cfg.reps = *args.reps;
  if (args.seed) cfg.seed = *args.seed;
  if (args.format) cfg.format = cli::format_from_string(*args.format);
  cfg.validate();

  const cli::Experiment e = cli::run_experiment(cfg, RunOptions{args.threads});
  const std::string ext(cli::to_string(cfg.format));

  if (!args.out.empty()) {
    const fs::path dir(args.out);
    fs::create_directories(dir);
    if (cfg.format == cli::Format::Json) {
      write_file(dir / (cfg.name + ".json"), cli::render_json(e));
    } else {
      write_file(dir / (cfg.name + "_bias." + ext), cli::render_table(e, cli::Measure::Bias, cfg.format));
      write_file(dir / (cfg.name + "_mse." + ext), cli::render_table(e, cli::Measure::Mse, cfg.format));
    }
    write_file(dir / (cfg.name + "_cells.csv"), cli::render_cells_csv(e.cells));
    return 0;
  }

  if (cfg.format == cli::Format::Json) {
    std::cout << cli::render_json(e);
  } else if (args.table) {
    const auto m = *args.table % 2 == 1 ? cli::Measure::Bias : cli::Measure::Mse;
    std::cout << cli::render_table(e, m, cfg.format);
  } else {
    std::cout << cli::render_table(e, cli::Measure::Bias, cfg.format) << "\n"
              << cli::render_table(e, cli::Measure::Mse, cfg.format);
  }
  return 0;
}

struct FitArgs {
  std::string family;
  std::string estimator;
  std::optional<double> a;
  std::uint64_t seed = 0;
  std::string data;
};

int run_fit(const FitArgs& args) {
  Family family;
  EstimatorSpec spec;
  try {
    family = family_from_string(args.family);
    spec = parse_estimator(args.estimator);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  if (args.a) {
    if (spec.kind != EstimatorKind::Stein) throw ConfigError("--a applies to stein only", 0, "a");
    if (!(*args.a > 0.0)) throw ConfigError("--a must be positive", 0, "a");
    spec.tuning = *args.a;
  }
  std::ifstream in(args.data);
  if (!in) throw ConfigError("cannot open data file '" + args.data + "'", 0, "data");
  const std::vector<double> data = cli::read_data(in);
  std::cout << cli::fit_once_json(family, data, spec, args.seed) << "\n";
  return 0;
}

struct BenchArgs {
  std::size_t reps = 200;
  std::size_t n = 100;
  std::uint64_t seed = 1;
};

int run_bench(const BenchArgs& args) {
  struct Item {
    Family family;
    ParamVector theta0;
    const char* estimator;
  };
  const std::vector<Item> items{
      {Family::Exponential, ParamVector(Family::Exponential, {2.0}), "stein(1)"},
      {Family::Exponential, ParamVector(Family::Exponential, {2.0}), "cvm"},
      {Family::Rayleigh, ParamVector(Family::Rayleigh, {2.0}), "stein(1)"},
      {Family::Burr, ParamVector(Family::Burr, {2.0, 5.0}), "stein(3)"},
      {Family::Burr, ParamVector(Family::Burr, {2.0, 5.0}), "ml"},
      {Family::Burr, ParamVector(Family::Burr, {2.0, 5.0}), "cvm"},
      {Family::ExpPoly, ParamVector(Family::ExpPoly, {0.0, -0.5}), "stein(1)"},
      {Family::ExpPoly, ParamVector(Family::ExpPoly, {0.0, -0.5}), "sm"},
      {Family::ExpPoly, ParamVector(Family::ExpPoly, {0.0, -0.5}), "nce"},
  };
  std::printf("kernels: %s\n", std::string(kernels::to_string(kernels::active_isa())).c_str());
  std::printf("%-12s %-10s %6s %6s %12s %9s\n", "family", "estimator", "n", "reps", "us/fit",
              "failures");
  for (const Item& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    const McSummary m = run_cell(it.family, it.theta0, args.n, parse_estimator(it.estimator),
                                 args.reps, args.seed, RunOptions{1});
    const std::chrono::duration<double, std::micro> dt = std::chrono::steady_clock::now() - t0;
    std::printf("%-12s %-10s %6zu %6zu %12.1f %9zu\n", std::string(to_string(it.family)).c_str(),
                it.estimator, args.n, args.reps, dt.count() / static_cast<double>(args.reps),
                m.failure_count);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stein-type minimum distance estimation: fits, simulation tables, benchmarks"};
  app.set_version_flag("--version", cli::version());
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "Fit one estimator to a data file and print JSON");
  fit_cmd->add_option("--family", fit.family, "exponential, rayleigh, burr or exppoly")->required();
  fit_cmd->add_option("--estimator", fit.estimator, "ml, mse, cvm, mom, am, sm, nce, stein(a)")
      ->required();
  fit_cmd->add_option("--a", fit.a, "Weight parameter for a bare 'stein'");
  fit_cmd->add_option("--seed", fit.seed, "Seed for NCE noise");
  fit_cmd->add_option("data", fit.data, "One positive value per line")->required();

  TablesArgs tables;
  auto* tables_cmd = app.add_subcommand("tables", "Run a simulation experiment and emit tables");
  auto* table_opt = tables_cmd->add_option("--table", tables.table, "Built-in table 1-8");
  auto* config_opt = tables_cmd->add_option("--config", tables.config, "Experiment config file");
  table_opt->excludes(config_opt);
  tables_cmd->add_option("--seed", tables.seed, "Override the seed");
  tables_cmd->add_option("--reps", tables.reps, "Replications per cell (default 10000)");
  tables_cmd->add_option("--format", tables.format, "csv, md or json");
  tables_cmd->add_option("--out", tables.out, "Write files to this directory");
  tables_cmd->add_option("--threads", tables.threads, "Worker threads, 0 = all cores");
  tables_cmd->add_flag("--full", tables.full, "Use 100000 replications");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time each estimator on a representative cell");
  bench_cmd->add_option("--reps", bench.reps, "Fits per estimator");
  bench_cmd->add_option("--n", bench.n, "Sample size");
  bench_cmd->add_option("--seed", bench.seed, "Seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigExit;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fit);
    if (tables_cmd->parsed()) {
      if (!tables.table && tables.config.empty())
        throw ConfigError("tables needs --table N or --config PATH");
      return run_tables(tables);
    }
    if (bench_cmd->parsed()) return run_bench(bench);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
  return 0;
}
