#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace odscale::metrics {

enum class ObservationKind { Counts, TravelTimes };

struct Observation {
  std::string entity;
  double ground_truth = 0.0;
  double estimate = 0.0;
};

/// Ground-truth/estimate pairs over one explicit aggregation scope (one hour,
/// a sensor subset, or several hours pooled).
struct PairedObservations {
  ObservationKind kind = ObservationKind::Counts;
  std::vector<Observation> entries;
};

/// Root mean square error normalized by the mean ground truth, in percent:
///   |S| / sum(y_gt) * sqrt(mean((y_hat - y_gt)^2)) * 100
/// Throws EmptyCollection, ZeroGroundTruthSum, or SchemaError for negative
/// ground truth.
double nrmse(const PairedObservations& obs);

/// (baseline - model) / baseline * 100. Throws ZeroBaseline.
double pct_improvement(double nrmse_baseline, double nrmse_model);

/// (proposed - benchmark) / benchmark * 100. Throws ZeroBenchmark.
double pct_gap(double nrmse_proposed, double nrmse_benchmark);

/// Report rounding: nearest integer, halves away from zero.
long long round_report(double value);

/// Median of the values; mean of the two middle values for even sizes.
/// Throws EmptyCollection.
double median(std::span<const double> values);

double mean(std::span<const double> values);

/// Empirical cdf as (value, fraction <= value) pairs over the sorted values.
std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values);

}  // namespace odscale::metrics
