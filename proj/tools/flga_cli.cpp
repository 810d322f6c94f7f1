// Command-line front end: flow cases, calibration sweeps, timing runs and
// collision-table dumps, all driven by flat key = value config files.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <span>
#include <string>
#include <vector>

#include "flga/cases.hpp"
#include "flga/collision_table.hpp"
#include "flga/config.hpp"
#include "flga/core.hpp"
#include "flga/lattice.hpp"

namespace {

namespace fs = std::filesystem;

struct ConfigArgs {
  std::string path;
  std::vector<std::string> overrides;
  std::string output_dir;
};

void add_config_options(CLI::App* cmd, ConfigArgs& args) {
  cmd->add_option("config", args.path, "key = value config file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--set", args.overrides,
                  "override a config key, e.g. --set steps=100 (repeatable)");
  cmd->add_option("-o,--output", args.output_dir,
                  "write results here (overrides output_dir in the file)");
}

flga::RunConfig load(const ConfigArgs& args) {
  auto overrides = args.overrides;
  if (!args.output_dir.empty())
    overrides.push_back("output_dir=" + args.output_dir);
  flga::RunConfig cfg = flga::load_config(args.path, overrides);

  // A relative output location can be rerooted per invocation without
  // touching the config file.
  if (const char* root = std::getenv("FLGA_OUTPUT_ROOT");
      root && *root && !cfg.output_dir.empty() &&
      fs::path(cfg.output_dir).is_relative()) {
    cfg.output_dir = (fs::path(root) / cfg.output_dir).string();
  }
  return cfg;
}

void print_qflga_report(const flga::QflgaCompareReport& report) {
  std::cout.precision(17);
  std::cout << "steps_run = " << report.steps_run << "\n"
            << "first_step_difference = " << report.first_step_difference << "\n"
            << "max_abs_difference = " << report.max_abs_difference << "\n"
            << "mass_drift = " << report.mass_drift << "\n"
            << "total_seconds = " << report.total_seconds << "\n";
}

int run_command(const ConfigArgs& args) {
  const flga::RunConfig cfg = load(args);
  if (cfg.compare == flga::CompareTarget::qflga) {
    print_qflga_report(flga::qflga_compare(cfg));
    return 0;
  }
  const flga::CaseReport report = flga::run_case(cfg);
  flga::write_report(std::cout, report);
  if (!report.sweep.empty()) flga::write_sweep_csv(std::cout, report);
  return 0;
}

int sweep_command(const ConfigArgs& args) {
  const flga::RunConfig cfg = load(args);
  const flga::TauSweepResult result = flga::sweep_tau(cfg);
  flga::write_tau_points_csv(std::cout, result.points);
  std::cout.precision(17);
  if (result.curve_valid) {
    std::cout << "# gamma = " << result.curve.gamma << "\n"
              << "# pi0 = " << result.curve.pi0 << "\n";
  } else {
    std::cout << "# curve fit skipped: not enough stable points\n";
  }
  return 0;
}

int bench_command(const ConfigArgs& args) {
  const flga::RunConfig cfg = load(args);
  const auto rows = flga::bench_timing(cfg);
  flga::write_bench_csv(std::cout, rows);
  std::cout.precision(6);
  for (const auto& solver : cfg.bench_solvers) {
    const auto fit = flga::bench_fit(rows, solver);
    std::cout << "# " << solver << ": slope = " << fit.slope
              << ", r2 = " << fit.r2 << "\n";
  }
  return 0;
}

int qflga_command(const ConfigArgs& args) {
  flga::RunConfig cfg = load(args);
  print_qflga_report(flga::qflga_compare(cfg));
  return 0;
}

struct TableArgs {
  std::string model = "d1q3";
  int bodies = 2;
  std::vector<double> lambda{1.0};
  double c = 1.0;
  bool keep_spectators = false;
  std::string output;
};

int table_command(const TableArgs& args) {
  const auto& desc = flga::descriptor(flga::model_from_string(args.model));
  const auto enumeration =
      flga::enumerate_equivalence_classes(desc, args.bodies, args.keep_spectators);
  std::vector<double> rates = args.lambda;
  if (rates.size() != 1 && rates.size() != enumeration.classes.size()) {
    std::cerr << "lambda needs 1 or " << enumeration.classes.size()
              << " entries for " << args.model << " " << args.bodies
              << "-body classes\n";
    return 2;
  }
  const auto table = flga::build_collision_table(desc, enumeration, rates, args.c);
  if (args.output.empty()) {
    flga::write_table_csv(std::cout, desc, enumeration, table);
  } else {
    std::ofstream os(args.output);
    if (!os) {
      std::cerr << "cannot write " << args.output << "\n";
      return 1;
    }
    flga::write_table_csv(os, desc, enumeration, table);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice-kinetic fluid workbench"};
  app.require_subcommand(1);

  ConfigArgs run_args, sweep_args, bench_args, qflga_args;
  TableArgs table_args;

  auto* run = app.add_subcommand("run", "run a flow case and print its report");
  add_config_options(run, run_args);

  auto* sweep = app.add_subcommand(
      "sweep-tau", "fit the relaxation time across coupling strengths");
  add_config_options(sweep, sweep_args);

  auto* bench =
      app.add_subcommand("bench", "time the collision kernels across grid sizes");
  add_config_options(bench, bench_args);

  auto* qflga = app.add_subcommand(
      "qflga-compare", "compare the quantum chain update with the classical one");
  add_config_options(qflga, qflga_args);

  auto* table = app.add_subcommand("dump-table", "print a collision table as CSV");
  table->add_option("--model", table_args.model, "lattice stencil")
      ->check(CLI::IsMember({"d1q3", "d2q9"}));
  table->add_option("--bodies", table_args.bodies, "channels per collision")
      ->check(CLI::Range(2, 4));
  table->add_option("--lambda", table_args.lambda,
                    "relaxation rate, scalar or one value per class");
  table->add_option("--c", table_args.c, "coupling prefactor");
  table->add_flag("--keep-spectators", table_args.keep_spectators,
                  "keep transitions with a channel on both sides");
  table->add_option("-o,--output", table_args.output, "write CSV here instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(run_args);
    if (sweep->parsed()) return sweep_command(sweep_args);
    if (bench->parsed()) return bench_command(bench_args);
    if (qflga->parsed()) return qflga_command(qflga_args);
    return table_command(table_args);
  } catch (const flga::ConfigError& err) {
    std::cerr << "config error:\n";
    for (const auto& issue : err.issues())
      std::cerr << "  " << issue.key << ": " << issue.message << "\n";
    return 2;
  } catch (const flga::InstabilityError& err) {
    std::cerr << "unstable: " << err.what() << " (site " << err.site() << ")\n";
    return 3;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
