#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "odscale/error.hpp"
#include "odscale/flow_model.hpp"
#include "odscale/network.hpp"

namespace odscale {

/// Observed path travel times for one time interval. Held in hours; the
/// objective converts to seconds before squaring.
struct GroundTruth {
  struct Entry {
    std::string path_id;
    double travel_time_h = 0.0;
    double weight = 1.0;

    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::vector<Entry> entries;

  friend bool operator==(const GroundTruth&, const GroundTruth&) = default;
};

struct ObjectiveValue {
  double value = 0.0;       // s^2
  double derivative = 0.0;  // s^2 per unit x
};

/// Weighted mean squared travel-time error as a function of the scaling
/// factor, bound to one snapshot, parameter set and ground truth.
class TravelTimeObjective {
public:
  /// Throws UnknownPath, EmptyGroundTruth (no entries or all weights zero),
  /// DuplicateId or InvalidParams (non-positive travel time, negative weight).
  TravelTimeObjective(const NetworkSnapshot& snapshot, const ModelParams& params, const GroundTruth& gt);

  /// Throws XOutOfBounds outside [x_lower, x_upper], NonFiniteResult on NaN.
  ObjectiveValue operator()(double x);

  const ModelParams& params() const noexcept { return params_; }

private:
  ModelParams params_;
  FlowEvaluator evaluator_;
  std::vector<std::size_t> paths_;
  std::vector<double> gt_seconds_;
  std::vector<double> weights_;
};

/// f(x) = (1/|P|) sum_p w_p (t_p^GT - t_p(x))^2 and its derivative, in seconds.
ObjectiveValue objective(const NetworkSnapshot& snapshot, const ModelParams& params, const GroundTruth& gt, double x);

struct EstimationOptions {
  int seeds = 8;               // equally spaced starts across [x_lower, x_upper]
  int max_iterations = 200;    // per start
  double tol_x_rel = 1e-8;     // bracket width tolerance, relative to x_upper - x_lower
  double tol_g = 1e-10;        // projected-gradient tolerance
  double tol_f = 1e-12;        // objective values within tol_f (1 + |f|) count as ties

  friend bool operator==(const EstimationOptions&, const EstimationOptions&) = default;
};

struct TracePoint {
  double x = 0.0;
  double f = 0.0;
  double df = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct EstimationResult {
  double x_star = 0.0;
  double objective_value = 0.0;  // s^2
  int iterations = 0;
  bool converged = false;
  std::vector<double> upscaled_od_vph;           // by snapshot.od_pairs()
  std::vector<double> predicted_travel_times_s;  // by snapshot.paths()
  std::vector<double> predicted_counts_vph;      // by snapshot.segments()
  std::vector<TracePoint> trace;                 // every evaluation, in order
};

/// Bounded scalar minimization of the travel-time objective. Never throws on
/// hitting the iteration cap; the result then has converged = false.
EstimationResult estimate(const NetworkSnapshot& snapshot, const ModelParams& params, const GroundTruth& gt,
                          const EstimationOptions& options = {});

/// Uniform upscaling of the subsample demand. Throws XOutOfBounds for x < 0.
std::vector<OdPair> apply_scaling(std::span<const OdPair> od_pairs, double x);

struct GridSpec {
  double x_lower = 1.0;
  double x_upper = 100.0;
  std::size_t points = 100001;
};

/// Equally spaced points x_lower + k (x_upper - x_lower) / (points - 1).
/// A single point grid is {x_lower}. Throws EmptyGrid for zero points.
std::vector<double> grid_points(const GridSpec& spec);

struct GridSearchResult {
  double x_bench = 0.0;
  double f_bench = 0.0;
  std::vector<std::pair<double, double>> curve;  // (x, f(x)) in grid order
};

/// Evaluates f on every point and returns the argmin; equal values keep the
/// earliest point, so ascending grids break ties toward smaller x.
template <typename F>
GridSearchResult argmin_on_grid(std::span<const double> xs, F&& f) {
  if (xs.empty()) throw Error(ErrorCode::EmptyGrid, "grid has no points");
  GridSearchResult result;
  result.curve.reserve(xs.size());
  result.f_bench = std::numeric_limits<double>::infinity();
  for (double x : xs) {
    const double value = f(x);
    result.curve.emplace_back(x, value);
    if (value < result.f_bench || result.curve.size() == 1) {
      result.f_bench = value;
      result.x_bench = x;
    }
  }
  return result;
}

GridSearchResult grid_search_benchmark(const NetworkSnapshot& snapshot, const ModelParams& params,
                                       const GroundTruth& gt, const GridSpec& grid);

}  // namespace odscale
