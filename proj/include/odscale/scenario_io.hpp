#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odscale/estimator.hpp"
#include "odscale/flow_model.hpp"
#include "odscale/network.hpp"

namespace odscale {

inline constexpr int kSchemaVersion = 1;

/// Contents of the flat key=value config file.
struct ScenarioConfig {
  ModelParams params;
  EstimationOptions options;
  std::size_t grid_points = 100001;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Segment-level count measurement (veh/h), used only for validation.
struct SensorCount {
  std::string segment_id;
  double count_vph = 0.0;

  friend bool operator==(const SensorCount&, const SensorCount&) = default;
};

/// File locations for one time interval.
struct ScenarioBundle {
  std::string hour;
  std::filesystem::path segments;
  std::filesystem::path paths;
  std::filesystem::path od;
  std::filesystem::path ground_truth;
  std::filesystem::path config;
  std::optional<std::filesystem::path> sensors;
  std::optional<std::filesystem::path> assignment;
};

struct Scenario {
  NetworkSnapshot snapshot;
  ScenarioConfig config;
  GroundTruth ground_truth;
};

// File names inside a scenario directory.
inline constexpr const char* kSegmentsFile = "segments.csv";
inline constexpr const char* kPathsFile = "paths.csv";
inline constexpr const char* kOdFile = "od.csv";
inline constexpr const char* kGroundTruthFile = "gt_travel_times.csv";
inline constexpr const char* kSensorsFile = "sensors.csv";
inline constexpr const char* kAssignmentFile = "assignment.csv";
inline constexpr const char* kConfigFile = "config.txt";
inline constexpr const char* kManifestFile = "manifest.txt";

/// Finds the bundles under a scenario directory. A directory holding od.csv
/// is a single bundle (labelled `single_label`); otherwise every
/// subdirectory holding od.csv is one hour, labelled by its name, with
/// segments.csv, paths.csv and config.txt falling back to the parent.
/// `config_override` replaces every bundle's config file; `hour_filter`
/// keeps only the matching label.
///
/// Throws IoError when nothing usable exists and SchemaError on duplicate
/// hour labels.
std::vector<ScenarioBundle> discover_bundles(const std::filesystem::path& dir,
                                             const std::optional<std::filesystem::path>& config_override = {},
                                             const std::optional<std::string>& hour_filter = {},
                                             const std::string& single_label = "all");

/// Parses and validates the network, demand, ground truth and config of a
/// bundle. Never opens the sensors file.
///
/// Throws ParseError, SchemaError or UnitError.
Scenario parse_scenario(const ScenarioBundle& bundle);

std::vector<Segment> read_segments(const std::filesystem::path& file);
std::vector<Path> read_paths(const std::filesystem::path& file);
std::vector<OdPair> read_od(const std::filesystem::path& file);
std::vector<AssignmentEntry> read_assignment(const std::filesystem::path& file);
/// Accepts a tt_s, tt_min or tt_h column; any other tt_* column is a UnitError.
GroundTruth read_ground_truth(const std::filesystem::path& file);
/// Throws NoSensors for a file without rows.
std::vector<SensorCount> read_sensors(const std::filesystem::path& file);
/// Missing keys take their defaults except kappa, which is required.
ScenarioConfig read_config(const std::filesystem::path& file);

void write_segments(const std::filesystem::path& file, std::span<const Segment> segments);
void write_paths(const std::filesystem::path& file, std::span<const Path> paths);
void write_od(const std::filesystem::path& file, std::span<const OdPair> od_pairs);
void write_assignment(const std::filesystem::path& file, std::span<const AssignmentEntry> entries);
/// Always written in seconds.
void write_ground_truth(const std::filesystem::path& file, const GroundTruth& gt);
void write_sensors(const std::filesystem::path& file, std::span<const SensorCount> sensors);
void write_config(const std::filesystem::path& file, const ScenarioConfig& config);

/// Ordered key=value pairs; '#' starts a comment line.
using KeyValues = std::vector<std::pair<std::string, std::string>>;
KeyValues read_key_values(const std::filesystem::path& file);
void write_key_values(const std::filesystem::path& file, const KeyValues& values);

}  // namespace odscale
