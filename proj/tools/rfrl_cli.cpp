// rfrl: validate, run and summarize reward-free exploration experiments.
//
// Exit codes: 0 success, 2 invalid configuration or arguments, 3 failure
// while computing.

#include <CLI11.hpp>
#include <iostream>

#include "rfrl/errors.hpp"
#include "rfrl/harness/config.hpp"
#include "rfrl/harness/report.hpp"
#include "rfrl/harness/runner.hpp"

namespace {

constexpr int kInvalid = 2;
constexpr int kFailed = 3;

}  // namespace

int main(int argc, char** argv) {
  using namespace rfrl::harness;

  CLI::App app{"Reward-free exploration and planning experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version() + " (" + git_revision() + ")");

  std::string config_path;
  auto* validate = app.add_subcommand("validate", "Check a run configuration without computing");
  validate->add_option("--config", config_path, "Run configuration (JSON)")->required();

  std::string out_dir, seeds;
  bool quiet = false;
  auto* run = app.add_subcommand("run", "Run every (K, seed) job of a configuration");
  run->add_option("--config", config_path, "Run configuration (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the config)");
  run->add_option("--seeds", seeds, "Seed list overriding the config, e.g. 0,1,5-9");
  run->add_flag("--quiet", quiet, "No progress output");

  std::string results_dir, summary_path;
  auto* report = app.add_subcommand("report", "Aggregate results.csv per K");
  report->add_option("dir", results_dir, "Run output directory or results.csv")->required();
  report->add_option("--out", summary_path, "Summary CSV path (default <dir>/summary.csv)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInvalid;
  }

  if (*validate) {
    try {
      const RunConfig config = load_config(config_path);
      std::cout << config_path << ": ok (" << config.episodes.size() * config.seeds.size() << " jobs)\n";
      return 0;
    } catch (const ConfigError& e) {
      std::cerr << e.what() << '\n';
      return kInvalid;
    }
  }

  if (*run) {
    RunConfig config;
    RunOptions options;
    try {
      config = load_config(config_path);
      if (!seeds.empty()) options.seeds = parse_seed_list(seeds);
    } catch (const ConfigError& e) {
      std::cerr << e.what() << '\n';
      return kInvalid;
    } catch (const std::invalid_argument& e) {
      std::cerr << "--seeds: " << e.what() << '\n';
      return kInvalid;
    }
    if (!out_dir.empty()) options.output = out_dir;
    if (!quiet) options.progress = &std::cerr;
    try {
      const RunSummary summary = run_experiment(std::move(config), options);
      if (!quiet)
        std::cerr << "wrote " << summary.result_rows << " result rows from " << summary.jobs << " jobs to "
                  << summary.directory.string() << '\n';
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "run failed: " << e.what() << '\n';
      return kFailed;
    }
  }

  try {
    const Report summary = summarize(results_dir);
    std::cout << format_table(summary);
    std::filesystem::path target = summary_path;
    if (target.empty())
      target = (std::filesystem::is_directory(results_dir) ? std::filesystem::path(results_dir)
                                                           : std::filesystem::path(results_dir).parent_path()) /
               "summary.csv";
    write_summary_csv(summary, target);
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return kInvalid;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kFailed;
  }
}
