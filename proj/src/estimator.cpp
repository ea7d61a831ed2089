#include "odscale/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <unordered_set>

namespace odscale {

TravelTimeObjective::TravelTimeObjective(const NetworkSnapshot& snapshot, const ModelParams& params,
                                         const GroundTruth& gt)
    : params_(params), evaluator_(snapshot, params, segment_demand_coefficients(snapshot)) {
  if (gt.entries.empty()) throw Error(ErrorCode::EmptyGroundTruth, "no ground-truth travel times");
  std::unordered_set<std::string> seen;
  bool any_weight = false;
  for (const auto& entry : gt.entries) {
    auto index = snapshot.path_index(entry.path_id);
    if (!index) throw Error(ErrorCode::UnknownPath, "ground truth references path '" + entry.path_id + "'");
    if (!seen.insert(entry.path_id).second) {
      throw Error(ErrorCode::DuplicateId, "ground truth lists path '" + entry.path_id + "' twice");
    }
    if (!(std::isfinite(entry.travel_time_h) && entry.travel_time_h > 0.0)) {
      throw Error(ErrorCode::InvalidParams, "travel time of path '" + entry.path_id + "' must be > 0");
    }
    if (!(std::isfinite(entry.weight) && entry.weight >= 0.0)) {
      throw Error(ErrorCode::InvalidParams, "weight of path '" + entry.path_id + "' must be >= 0");
    }
    any_weight = any_weight || entry.weight > 0.0;
    paths_.push_back(*index);
    gt_seconds_.push_back(entry.travel_time_h * kSecondsPerHour);
    weights_.push_back(entry.weight);
  }
  if (!any_weight) throw Error(ErrorCode::EmptyGroundTruth, "all ground-truth weights are zero");
}

ObjectiveValue TravelTimeObjective::operator()(double x) {
  if (!(x >= params_.x_lower && x <= params_.x_upper)) {
    throw Error(ErrorCode::XOutOfBounds, "x = " + std::to_string(x));
  }
  evaluator_.load(x);
  double value = 0.0;
  double derivative = 0.0;
  for (std::size_t e = 0; e < paths_.size(); ++e) {
    const double t_s = evaluator_.path_time(paths_[e]) * kSecondsPerHour;
    const double dt_s = evaluator_.path_time_derivative(paths_[e]) * kSecondsPerHour;
    const double residual = gt_seconds_[e] - t_s;
    value += weights_[e] * residual * residual;
    derivative += -2.0 * weights_[e] * residual * dt_s;
  }
  const double n = static_cast<double>(paths_.size());
  ObjectiveValue out{value / n, derivative / n};
  if (!std::isfinite(out.value) || !std::isfinite(out.derivative)) {
    throw Error(ErrorCode::NonFiniteResult, "objective at x = " + std::to_string(x));
  }
  return out;
}

ObjectiveValue objective(const NetworkSnapshot& snapshot, const ModelParams& params, const GroundTruth& gt, double x) {
  TravelTimeObjective f(snapshot, params, gt);
  return f(x);
}

namespace {

struct Candidate {
  TracePoint point;
  bool converged = false;
};

class Minimizer {
public:
  Minimizer(TravelTimeObjective& f, const EstimationOptions& options)
      : f_(f), options_(options), lower_(f.params().x_lower), upper_(f.params().x_upper),
        tol_x_(options.tol_x_rel * (upper_ - lower_)) {}

  TracePoint eval(double x) {
    const auto v = f_(x);
    trace_.push_back({x, v.value, v.derivative});
    return trace_.back();
  }

  // a.df < 0 < b.df: a stationary point lies strictly between. Safeguarded
  // secant on f', falling back to bisection whenever an iterate leaves the
  // bracket or the bracket fails to halve.
  Candidate refine(TracePoint a, TracePoint b) {
    TracePoint lo = a, hi = b;
    TracePoint prev = a, cur = b;
    TracePoint best = a.f <= b.f ? a : b;
    double last_width = hi.x - lo.x;
    bool force_bisect = false;
    // Ties with the lowest f go to the smaller |f'|.
    auto settle = [&](const TracePoint& p) { return best.f < p.f - tie_tolerance(p.f) ? best : p; };
    auto closest = [&] { return settle(std::abs(lo.df) <= std::abs(hi.df) ? lo : hi); };
    for (int it = 0; it < options_.max_iterations; ++it) {
      if (hi.x - lo.x <= tol_x_) return {closest(), true};
      double x = 0.5 * (lo.x + hi.x);
      if (!force_bisect && cur.df != prev.df) {
        const double secant = cur.x - cur.df * (cur.x - prev.x) / (cur.df - prev.df);
        if (secant > lo.x && secant < hi.x) x = secant;
      }
      if (x == cur.x || x == prev.x) x = 0.5 * (lo.x + hi.x);
      if (x <= lo.x || x >= hi.x) return {closest(), true};  // bracket exhausted at machine precision

      const TracePoint p = eval(x);
      ++iterations_;
      if (p.f < best.f || (p.f == best.f && p.x < best.x)) best = p;
      if (std::abs(p.df) <= options_.tol_g) return {settle(p), true};
      if (p.df < 0.0) lo = p;
      else hi = p;
      prev = cur;
      cur = p;

      const double width = hi.x - lo.x;
      force_bisect = width > 0.5 * last_width;
      last_width = width;
    }
    if (hi.x - lo.x <= tol_x_) return {closest(), true};
    return {best, false};
  }

  // Walks downhill from an interior point with a non-zero slope until the
  // slope changes sign or a bound is reached, then refines.
  Candidate polish(TracePoint start) {
    const double direction = start.df < 0.0 ? 1.0 : -1.0;
    double step = std::max(tol_x_, 1e-3 * (upper_ - lower_));
    TracePoint from = start;
    for (int it = 0; it < options_.max_iterations; ++it) {
      const double x = std::clamp(from.x + direction * step, lower_, upper_);
      const TracePoint p = eval(x);
      ++iterations_;
      const bool crossed = direction > 0 ? p.df > 0.0 : p.df < 0.0;
      if (crossed) return direction > 0 ? refine(from, p) : refine(p, from);
      if (p.f > from.f) return {from, false};
      if (x == lower_ || x == upper_) return {p, projected_gradient(p) <= options_.tol_g};
      from = p;
      step *= 2.0;
    }
    return {from, false};
  }

  double projected_gradient(const TracePoint& p) const {
    if (p.x <= lower_) return std::abs(std::min(p.df, 0.0));
    if (p.x >= upper_) return std::abs(std::max(p.df, 0.0));
    return std::abs(p.df);
  }

  // Objective values closer than tol_f (1 + |f|) are ties.
  double tie_tolerance(double f) const { return options_.tol_f * (1.0 + std::abs(f)); }

  bool better(const TracePoint& a, const TracePoint& b) const {
    if (std::abs(a.f - b.f) <= tie_tolerance(std::min(a.f, b.f))) return a.x < b.x;
    return a.f < b.f;
  }

  std::vector<TracePoint>& trace() { return trace_; }
  int iterations() const { return iterations_; }

private:
  TravelTimeObjective& f_;
  const EstimationOptions& options_;
  double lower_;
  double upper_;
  double tol_x_;
  std::vector<TracePoint> trace_;
  int iterations_ = 0;
};

}  // namespace

EstimationResult estimate(const NetworkSnapshot& snapshot, const ModelParams& params, const GroundTruth& gt,
                          const EstimationOptions& options) {
  validate(params);
  TravelTimeObjective f(snapshot, params, gt);
  Minimizer minimizer(f, options);

  const int seeds = std::max(2, options.seeds);
  std::vector<TracePoint> starts;
  starts.reserve(seeds);
  for (int k = 0; k < seeds; ++k) {
    const double x = k == seeds - 1 ? params.x_upper
                                    : params.x_lower + (params.x_upper - params.x_lower) * k / (seeds - 1);
    starts.push_back(minimizer.eval(x));
  }

  std::vector<Candidate> candidates;
  for (const auto& s : starts) {
    candidates.push_back({s, minimizer.projected_gradient(s) <= options.tol_g});
  }
  for (std::size_t k = 0; k + 1 < starts.size(); ++k) {
    if (starts[k].df < 0.0 && starts[k + 1].df > 0.0) candidates.push_back(minimizer.refine(starts[k], starts[k + 1]));
  }

  auto pick = [&] {
    std::size_t best = 0;
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      if (minimizer.better(candidates[c].point, candidates[best].point)) best = c;
    }
    return candidates[best];
  };
  Candidate best = pick();
  if (!best.converged) {
    candidates.push_back(minimizer.polish(best.point));
    best = pick();
  }

  EstimationResult result;
  result.x_star = best.point.x;
  result.objective_value = best.point.f;
  result.converged = best.converged;
  result.iterations = minimizer.iterations();
  result.trace = std::move(minimizer.trace());

  const auto coefficients = segment_demand_coefficients(snapshot);
  const auto state = load_network(snapshot, params, coefficients, result.x_star);
  for (const auto& od : snapshot.od_pairs()) result.upscaled_od_vph.push_back(result.x_star * od.subsample_demand_vph);
  result.predicted_travel_times_s.reserve(state.travel_time_h.size());
  for (double t : state.travel_time_h) result.predicted_travel_times_s.push_back(t * kSecondsPerHour);
  result.predicted_counts_vph = segment_counts(state, snapshot);
  return result;
}

std::vector<OdPair> apply_scaling(std::span<const OdPair> od_pairs, double x) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw Error(ErrorCode::XOutOfBounds, "scaling factor must be >= 0");
  std::vector<OdPair> scaled(od_pairs.begin(), od_pairs.end());
  for (auto& od : scaled) od.subsample_demand_vph *= x;
  return scaled;
}

std::vector<double> grid_points(const GridSpec& spec) {
  if (spec.points == 0) throw Error(ErrorCode::EmptyGrid, "grid has no points");
  if (!(spec.x_lower <= spec.x_upper)) throw Error(ErrorCode::EmptyGrid, "grid lower bound exceeds upper bound");
  std::vector<double> xs(spec.points);
  if (spec.points == 1) {
    xs[0] = spec.x_lower;
    return xs;
  }
  const double span = spec.x_upper - spec.x_lower;
  const double last = static_cast<double>(spec.points - 1);
  for (std::size_t k = 0; k < spec.points; ++k) xs[k] = spec.x_lower + span * (static_cast<double>(k) / last);
  xs.back() = spec.x_upper;
  return xs;
}

GridSearchResult grid_search_benchmark(const NetworkSnapshot& snapshot, const ModelParams& params,
                                       const GroundTruth& gt, const GridSpec& grid) {
  const auto xs = grid_points(grid);
  ModelParams bounded = params;
  bounded.x_lower = grid.x_lower;
  bounded.x_upper = std::max(grid.x_upper, std::nextafter(grid.x_lower, grid.x_lower + 1.0));
  TravelTimeObjective f(snapshot, bounded, gt);
  return argmin_on_grid(xs, [&](double x) { return f(x).value; });
}

}  // namespace odscale
