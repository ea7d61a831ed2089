#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "odscale/batch.hpp"
#include "odscale/error.hpp"
#include "odscale/scenario_io.hpp"
#include "odscale/synthetic.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBundleFailure = 1;
constexpr int kExitUsage = 2;

struct RunFlags {
  std::string network_dir;
  std::string config;
  std::string hour;
  std::string out = "out";
  std::optional<std::size_t> grid_points;
};

void add_run_flags(CLI::App& cmd, RunFlags& flags, bool with_grid) {
  cmd.add_option("--network-dir", flags.network_dir, "Scenario directory (flat or one subdirectory per hour)")
      ->required();
  cmd.add_option("--config", flags.config, "Config file replacing the scenario's config.txt");
  cmd.add_option("--hour", flags.hour, "Process only this hour label");
  cmd.add_option("--out", flags.out, "Report directory")->capture_default_str();
  if (with_grid) cmd.add_option("--grid-points", flags.grid_points, "Grid-search point count")->check(CLI::Range(1ul, 100000000ul));
}

int run(const RunFlags& flags, odscale::BatchMode mode) {
  std::optional<fs::path> config;
  if (!flags.config.empty()) config = flags.config;
  std::optional<std::string> hour;
  if (!flags.hour.empty()) hour = flags.hour;

  std::vector<odscale::ScenarioBundle> bundles;
  try {
    bundles = odscale::discover_bundles(flags.network_dir, config, hour);
  } catch (const odscale::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  const auto summary = odscale::run_batch(bundles, mode, flags.out, {flags.grid_points});
  std::size_t failed = 0;
  for (const auto& o : summary.outcomes) failed += o.ok ? 0 : 1;
  std::cout << summary.outcomes.size() - failed << " of " << summary.outcomes.size() << " bundle(s) ok; reports in "
            << flags.out << '\n';
  return failed == 0 ? kExitOk : kExitBundleFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-factor OD demand upscaling from path travel times"};
  app.require_subcommand(1);

  RunFlags estimate_flags, grid_flags, compare_flags, counts_flags;
  auto* estimate = app.add_subcommand("estimate", "Estimate the scaling factor of every hour");
  add_run_flags(*estimate, estimate_flags, false);
  auto* grid = app.add_subcommand("grid-search", "Exhaustive grid search of the objective");
  add_run_flags(*grid, grid_flags, true);
  auto* compare = app.add_subcommand("compare", "Baseline, grid-search benchmark and estimate side by side");
  add_run_flags(*compare, compare_flags, true);
  auto* counts = app.add_subcommand("validate-counts", "Compare modelled segment counts against sensors");
  add_run_flags(*counts, counts_flags, false);

  odscale::SyntheticSpec spec;
  std::string generate_out;
  std::string generate_config;
  std::vector<double> true_xs;
  std::vector<std::string> labels;
  auto* generate = app.add_subcommand("generate", "Write a synthetic scenario directory");
  generate->add_option("--out", generate_out, "Scenario directory to write")->required();
  generate->add_option("--config", generate_config, "Config providing model constants, bounds and optimizer options");
  generate->add_option("--seed", spec.rng_seed, "Random seed")->capture_default_str();
  generate->add_option("--segments", spec.segment_count, "Segment count")->capture_default_str();
  generate->add_option("--ods", spec.od_count, "OD pair count")->capture_default_str();
  generate->add_option("--true-x", true_xs, "True scaling factor; repeat for one hour each");
  generate->add_option("--hour", labels, "Hour labels, one per --true-x");
  generate->add_option("--noise", spec.noise_std_fraction, "Relative std of multiplicative noise")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  generate->add_option("--min-path-len", spec.min_path_segments, "Shortest path in segments")->capture_default_str();
  generate->add_option("--max-path-len", spec.max_path_segments, "Longest path in segments")->capture_default_str();
  generate->add_option("--sensors", spec.sensor_count, "Sensor count per hour")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*estimate) return run(estimate_flags, odscale::BatchMode::Estimate);
  if (*grid) return run(grid_flags, odscale::BatchMode::GridSearch);
  if (*compare) return run(compare_flags, odscale::BatchMode::Compare);
  if (*counts) return run(counts_flags, odscale::BatchMode::ValidateCounts);

  try {
    if (!generate_config.empty()) {
      const auto config = odscale::read_config(generate_config);
      spec.params = config.params;
      spec.options = config.options;
      spec.grid_points = config.grid_points;
    }
    if (true_xs.empty()) true_xs.push_back(spec.true_x);
    if (labels.empty()) {
      if (true_xs.size() == 1) {
        labels.emplace_back("all");
      } else {
        for (std::size_t h = 0; h < true_xs.size(); ++h) labels.push_back("h" + std::to_string(h + 1));
      }
    }
    if (labels.size() != true_xs.size()) {
      std::cerr << "error: --hour must be given once per --true-x\n";
      return kExitUsage;
    }
    const auto scenario = odscale::synthesize(spec, true_xs, labels);
    odscale::write_scenario(scenario, generate_out);
    std::cout << "wrote " << scenario.hours.size() << " hour(s) to " << generate_out << '\n';
    return kExitOk;
  } catch (const odscale::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == odscale::ErrorCode::IoError ? kExitBundleFailure : kExitUsage;
  }
}
