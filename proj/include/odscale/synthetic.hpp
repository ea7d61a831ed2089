#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "odscale/estimator.hpp"
#include "odscale/network.hpp"
#include "odscale/scenario_io.hpp"

namespace odscale {

/// Parameters of a randomly generated highway scenario. Path lengths count
/// segments, on-ramp and off-ramp included.
struct SyntheticSpec {
  std::size_t segment_count = 200;
  std::size_t od_count = 40;
  std::size_t min_path_segments = 3;
  std::size_t max_path_segments = 20;
  double true_x = 5.0;
  double noise_std_fraction = 0.0;
  std::uint64_t rng_seed = 1;
  double demand_min_vph = 20.0;
  double demand_max_vph = 200.0;
  /// kappa is set so the most loaded segment sits at this k/k_jam at true_x.
  double peak_density_ratio = 0.8;
  std::size_t sensor_count = 10;
  /// Fundamental-diagram constants and bounds; kappa is overwritten.
  ModelParams params{};
  EstimationOptions options{};
  std::size_t grid_points = 100001;
};

struct SyntheticHour {
  std::string label;
  double true_x = 0.0;
  std::vector<OdPair> od_pairs;
  GroundTruth ground_truth;
  std::vector<SensorCount> sensors;
};

struct SyntheticScenario {
  std::vector<Segment> segments;
  std::vector<Path> paths;
  ScenarioConfig config;
  std::vector<SyntheticHour> hours;
  std::uint64_t seed = 0;
};

/// Builds a corridor-and-branch network (mainlines with on/off ramps and
/// connectors between mainlines), routes od_count distinct ramp-to-ramp
/// paths over it, and derives ground truth at each hour's true scaling
/// factor. All hours share the network and paths; demands, noise and
/// sensor counts are drawn per hour.
///
/// Throws InfeasibleSpec when the spec cannot be realised.
SyntheticScenario synthesize(const SyntheticSpec& spec, std::span<const double> true_x_per_hour,
                             std::span<const std::string> hour_labels);
SyntheticScenario synthesize(const SyntheticSpec& spec);

/// Writes a scenario directory. A single hour is written flat; several
/// hours go to one subdirectory each, sharing the network files and config
/// at the root. A manifest records schema version, seed and true_x.
void write_scenario(const SyntheticScenario& scenario, const std::filesystem::path& dir);

/// synthesize() + write_scenario(); returns the bundles of the written directory.
std::vector<ScenarioBundle> generate_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace odscale
