#pragma once

// Hand-rolled generators for property tests: small random networks with
// random fundamental-diagram exponents and kappa.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "odscale/estimator.hpp"
#include "odscale/flow_model.hpp"
#include "odscale/network.hpp"
#include "oracle/reference_model.hpp"

namespace testgen {

struct Shape {
  std::size_t min_segments = 5;
  std::size_t max_segments = 50;
  std::size_t min_paths = 3;
  std::size_t max_paths = 20;
  double min_alpha = 1.0;
  double max_alpha = 4.0;
  // Peak k/k_jam reached at x_upper; above 1 some segments hit the plateau.
  double min_peak_ratio = 0.3;
  double max_peak_ratio = 1.5;
};

struct Instance {
  std::vector<odscale::Segment> segments;
  std::vector<odscale::Path> paths;
  std::vector<odscale::OdPair> od_pairs;
  odscale::ModelParams params;

  odscale::NetworkSnapshot snapshot() const { return odscale::build_snapshot(segments, paths, od_pairs); }

  oracle::Instance reference() const {
    return {segments, paths, od_pairs, params.k_jam, params.kappa, params.alpha1, params.alpha2};
  }
};

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

inline Instance random_instance(std::mt19937_64& rng, const Shape& shape = {}) {
  Instance in;
  const auto n = uniform_index(rng, shape.min_segments, shape.max_segments);
  for (std::size_t i = 0; i < n; ++i) {
    const double v_max = uniform(rng, 60.0, 130.0);
    in.segments.push_back({"s" + std::to_string(i), uniform(rng, 0.1, 3.0), static_cast<int>(uniform_index(rng, 1, 5)),
                           v_max, uniform(rng, 2.0, 0.4 * v_max)});
  }
  const auto path_count = uniform_index(rng, shape.min_paths, shape.max_paths);
  std::vector<std::size_t> order(n);
  for (std::size_t p = 0; p < path_count; ++p) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto len = uniform_index(rng, 1, std::min<std::size_t>(n, 12));
    for (std::size_t k = 0; k < len; ++k) std::swap(order[k], order[uniform_index(rng, k, n - 1)]);
    odscale::Path path{"p" + std::to_string(p), {}};
    for (std::size_t k = 0; k < len; ++k) path.segment_ids.push_back(in.segments[order[k]].id);
    in.paths.push_back(path);
    in.od_pairs.push_back({"od" + std::to_string(p), path.id, uniform(rng, 5.0, 300.0)});
  }
  in.params.alpha1 = uniform(rng, shape.min_alpha, shape.max_alpha);
  in.params.alpha2 = uniform(rng, shape.min_alpha, shape.max_alpha);
  in.params.k_jam = uniform(rng, 80.0, 160.0);
  in.params.x_lower = 1.0;
  in.params.x_upper = 100.0;

  // kappa so that the most loaded segment reaches the sampled peak ratio at x_upper.
  const auto snapshot = in.snapshot();
  const auto c = odscale::segment_demand_coefficients(snapshot);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, c[i] / in.segments[i].lanes);
  in.params.kappa = uniform(rng, shape.min_peak_ratio, shape.max_peak_ratio) / (in.params.x_upper * peak);
  return in;
}

/// Path travel times at x for every path, with multiplicative Gaussian noise
/// of relative std `noise` (floored at 5% of the clean value).
inline odscale::GroundTruth ground_truth_at(const Instance& in, double x, double noise, std::mt19937_64& rng) {
  const auto snapshot = in.snapshot();
  auto params = in.params;
  params.x_lower = std::min(params.x_lower, x);
  params.x_upper = std::max(params.x_upper, x);
  const auto state = odscale::load_network(snapshot, params, odscale::segment_demand_coefficients(snapshot), x);
  std::normal_distribution<double> gauss(0.0, 1.0);
  odscale::GroundTruth gt;
  for (std::size_t p = 0; p < in.paths.size(); ++p) {
    double t = state.travel_time_h[p];
    if (noise > 0.0) t = std::max(0.05 * t, t * (1.0 + noise * gauss(rng)));
    gt.entries.push_back({in.paths[p].id, t, 1.0});
  }
  return gt;
}

}  // namespace testgen
