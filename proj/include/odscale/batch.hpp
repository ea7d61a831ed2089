#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "odscale/estimator.hpp"
#include "odscale/scenario_io.hpp"

namespace odscale {

enum class BatchMode { Estimate, Evaluate, GridSearch, Compare, ValidateCounts };

struct BatchOptions {
  /// Overrides the config's grid_points when set.
  std::optional<std::size_t> grid_points;
};

/// Percentages as printed in reports: computed from the nRMSE values rounded
/// to whole percent. When the rounded denominator is zero the value is 0 if
/// both rounded inputs agree, and absent otherwise.
std::optional<double> reported_pct_improvement(double nrmse_baseline, double nrmse_model);
std::optional<double> reported_pct_gap(double nrmse_proposed, double nrmse_benchmark);

/// Travel-time comparison of the unscaled (x = 1), grid-search and estimated
/// demand for one hour.
struct TravelTimeComparison {
  std::string hour;
  double x_baseline = 1.0;
  double x_benchmark = 0.0;
  double x_proposed = 0.0;
  double baseline_nrmse = 0.0;
  double benchmark_nrmse = 0.0;
  double proposed_nrmse = 0.0;
  std::optional<double> pct_improvement;
  std::optional<double> pct_gap;
};

struct CountValidationRow {
  std::string segment_id;
  int lanes = 0;
  double gt_count_vph = 0.0;
  double proposed_count_vph = 0.0;
  double baseline_count_vph = 0.0;
  bool unloaded = false;  // no OD demand reaches the segment
};

struct CountValidation {
  std::string hour;
  std::vector<CountValidationRow> rows;
  double baseline_nrmse = 0.0;
  double proposed_nrmse = 0.0;
  std::optional<double> pct_improvement;
};

/// Per-sensor (observed, count at x_star, count at x = 1) triplets with count
/// nRMSE for both, written to `out_dir/counts_validation.csv`. The estimate
/// is an input only; nothing here feeds back into it.
///
/// Throws NoSensors for an empty sensor list, SchemaError for sensors on
/// unknown segments.
CountValidation export_counts_validation(const NetworkSnapshot& snapshot, const ModelParams& params,
                                         const EstimationResult& result, std::span<const SensorCount> sensors,
                                         const std::filesystem::path& out_dir, const std::string& hour = "all");

struct BundleOutcome {
  std::string hour;
  bool ok = false;
  std::string error;
};

struct BatchSummary {
  std::vector<BundleOutcome> outcomes;
  std::vector<TravelTimeComparison> comparisons;
  std::vector<CountValidation> validations;

  bool all_ok() const;
};

/// Runs every bundle in `mode`, isolating failures, and writes the reports
/// under out_dir:
///   estimate        estimates.{csv,txt,json}, <hour>/{upscaled_od,travel_times,trace}.csv
///   evaluate        as estimate, plus evaluation.{csv,txt} and scatter/cdf data
///   grid-search     grid_search.{csv,txt}, <hour>/objective_curve.csv
///   compare         compare.{csv,txt,json}, <hour>/scatter_*.csv, <hour>/cdf_*.csv
///   validate-counts counts_validation.{csv,txt}, <hour>/counts_validation.csv
/// Failed bundles are listed in failures.csv.
BatchSummary run_batch(std::span<const ScenarioBundle> bundles, BatchMode mode, const std::filesystem::path& out_dir,
                       const BatchOptions& options = {});

}  // namespace odscale
