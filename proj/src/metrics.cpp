#include "odscale/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "odscale/error.hpp"

namespace odscale::metrics {

double nrmse(const PairedObservations& obs) {
  if (obs.entries.empty()) throw Error(ErrorCode::EmptyCollection, "no observations");
  double gt_sum = 0.0;
  double squared = 0.0;
  for (const auto& e : obs.entries) {
    if (!(e.ground_truth >= 0.0)) {
      throw Error(ErrorCode::SchemaError, "ground truth of '" + e.entity + "' must be >= 0");
    }
    gt_sum += e.ground_truth;
    const double r = e.estimate - e.ground_truth;
    squared += r * r;
  }
  if (!(gt_sum > 0.0)) throw Error(ErrorCode::ZeroGroundTruthSum, "ground truth sums to zero");
  const double n = static_cast<double>(obs.entries.size());
  return n / gt_sum * std::sqrt(squared / n) * 100.0;
}

// The difference is scaled before dividing so that table inputs such as
// (41 - 40) * 100 / 40 evaluate to exactly 2.5.
double pct_improvement(double nrmse_baseline, double nrmse_model) {
  if (nrmse_baseline == 0.0) throw Error(ErrorCode::ZeroBaseline, "baseline nRMSE is zero");
  return (nrmse_baseline - nrmse_model) * 100.0 / nrmse_baseline;
}

double pct_gap(double nrmse_proposed, double nrmse_benchmark) {
  if (nrmse_benchmark == 0.0) throw Error(ErrorCode::ZeroBenchmark, "benchmark nRMSE is zero");
  return (nrmse_proposed - nrmse_benchmark) * 100.0 / nrmse_benchmark;
}

long long round_report(double value) { return std::llround(value); }

double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyCollection, "median of nothing");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) return sorted[mid];
  return 0.5 * (sorted[mid - 1] + sorted[mid]);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::EmptyCollection, "mean of nothing");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::pair<double, double>> cdf;
  const double n = static_cast<double>(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i + 1 < sorted.size() && sorted[i + 1] == sorted[i]) continue;
    cdf.emplace_back(sorted[i], static_cast<double>(i + 1) / n);
  }
  return cdf;
}

}  // namespace odscale::metrics
