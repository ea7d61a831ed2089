#include "odscale/flow_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "odscale/error.hpp"

namespace odscale {

void validate(const ModelParams& p) {
  auto bad = [](const std::string& rule) { throw Error(ErrorCode::InvalidParams, "violates " + rule); };
  if (!(std::isfinite(p.k_jam) && p.k_jam > 0.0)) bad("k_jam > 0");
  if (!(std::isfinite(p.kappa) && p.kappa > 0.0)) bad("kappa > 0");
  // Exponents below 1 make dv/dk unbounded at r = 0 or r = 1.
  if (!(std::isfinite(p.alpha1) && p.alpha1 >= 1.0)) bad("alpha1 >= 1");
  if (!(std::isfinite(p.alpha2) && p.alpha2 >= 1.0)) bad("alpha2 >= 1");
  if (!(std::isfinite(p.x_lower) && p.x_lower >= 0.0)) bad("x_lower >= 0");
  if (!(std::isfinite(p.x_upper) && p.x_lower < p.x_upper)) bad("x_lower < x_upper");
}

double fd_speed(double r, double v_min, double v_max, double alpha1, double alpha2) {
  if (r >= 1.0) return v_min;
  if (r <= 0.0) return v_max;
  return v_min + (v_max - v_min) * std::pow(1.0 - std::pow(r, alpha1), alpha2);
}

double fd_speed_slope(double r, double v_min, double v_max, double k_jam, double alpha1, double alpha2) {
  if (r >= 1.0) return 0.0;
  const double r_pow = r > 0.0 ? std::pow(r, alpha1 - 1.0) : (alpha1 == 1.0 ? 1.0 : 0.0);
  const double base = 1.0 - (r > 0.0 ? std::pow(r, alpha1) : 0.0);
  return -(v_max - v_min) * alpha2 * std::pow(base, alpha2 - 1.0) * alpha1 * r_pow / k_jam;
}

namespace {

struct SegmentState {
  double density;
  double speed;
  double time_h;
  double dt_dx;
};

SegmentState evaluate_segment(const Segment& s, const ModelParams& params, double density_per_demand,
                              double coefficient, double x) {
  const double k = density_per_demand * x * coefficient;
  const double r = std::min(k / params.k_jam, 1.0);
  const double v = fd_speed(r, s.v_min_kmh, s.v_max_kmh, params.alpha1, params.alpha2);
  const double dv_dk = fd_speed_slope(r, s.v_min_kmh, s.v_max_kmh, params.k_jam, params.alpha1, params.alpha2);
  // dt/dx = -(l / v^2) * dv/dk * dk/dx
  return {k, v, s.length_km / v, -(s.length_km / (v * v)) * dv_dk * density_per_demand * coefficient};
}

double density_per_demand(const Segment& s, const ModelParams& params) {
  return params.kappa * params.k_jam / s.lanes;
}

void check_coefficients(const NetworkSnapshot& snapshot, std::span<const double> coefficients) {
  if (coefficients.size() != snapshot.segments().size()) {
    throw Error(ErrorCode::InvalidParams, "coefficient count does not match segment count");
  }
}

}  // namespace

FlowEvaluator::FlowEvaluator(const NetworkSnapshot& snapshot, const ModelParams& params,
                             std::span<const double> coefficients)
    : snapshot_(&snapshot), params_(params), coefficients_(coefficients.begin(), coefficients.end()) {
  validate(params_);
  check_coefficients(snapshot, coefficients);
  const auto& segments = snapshot.segments();
  density_per_demand_.resize(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) density_per_demand_[i] = density_per_demand(segments[i], params_);
  segment_time_h_.resize(segments.size());
  segment_dt_dx_.resize(segments.size());
}

void FlowEvaluator::load(double x) {
  const auto& segments = snapshot_->segments();
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto state = evaluate_segment(segments[i], params_, density_per_demand_[i], coefficients_[i], x);
    segment_time_h_[i] = state.time_h;
    segment_dt_dx_[i] = state.dt_dx;
  }
}

double FlowEvaluator::path_time(std::size_t path) const {
  double t = 0.0;
  for (std::size_t i : snapshot_->path_segments(path)) t += segment_time_h_[i];
  return t;
}

double FlowEvaluator::path_time_derivative(std::size_t path) const {
  double dt = 0.0;
  for (std::size_t i : snapshot_->path_segments(path)) dt += segment_dt_dx_[i];
  return dt;
}

FlowState load_network(const NetworkSnapshot& snapshot, const ModelParams& params,
                       std::span<const double> coefficients, double x) {
  validate(params);
  if (!(x >= params.x_lower && x <= params.x_upper)) {
    throw Error(ErrorCode::XOutOfBounds, "x = " + std::to_string(x) + " outside [" +
                                             std::to_string(params.x_lower) + ", " +
                                             std::to_string(params.x_upper) + "]");
  }
  check_coefficients(snapshot, coefficients);

  const auto& segments = snapshot.segments();
  const std::size_t n_seg = segments.size();
  FlowState state;
  state.x = x;
  state.demand_vph.resize(n_seg);
  state.density.resize(n_seg);
  state.speed_kmh.resize(n_seg);
  std::vector<double> segment_time_h(n_seg);
  std::vector<double> segment_dt_dx(n_seg);

  for (std::size_t i = 0; i < n_seg; ++i) {
    const auto seg = evaluate_segment(segments[i], params, density_per_demand(segments[i], params), coefficients[i], x);
    state.demand_vph[i] = x * coefficients[i];
    state.density[i] = seg.density;
    state.speed_kmh[i] = seg.speed;
    segment_time_h[i] = seg.time_h;
    segment_dt_dx[i] = seg.dt_dx;
  }

  const std::size_t n_path = snapshot.paths().size();
  state.travel_time_h.resize(n_path);
  state.dtravel_time_dx.resize(n_path);
  for (std::size_t p = 0; p < n_path; ++p) {
    double t = 0.0;
    double dt = 0.0;
    for (std::size_t i : snapshot.path_segments(p)) {
      t += segment_time_h[i];
      dt += segment_dt_dx[i];
    }
    if (!std::isfinite(t) || !std::isfinite(dt)) {
      throw Error(ErrorCode::NonFiniteResult, "path '" + snapshot.paths()[p].id + "' at x = " + std::to_string(x));
    }
    state.travel_time_h[p] = t;
    state.dtravel_time_dx[p] = dt;
  }
  return state;
}

std::vector<double> travel_time_derivative(const NetworkSnapshot& snapshot, const ModelParams& params,
                                           std::span<const double> coefficients, double x) {
  return load_network(snapshot, params, coefficients, x).dtravel_time_dx;
}

std::vector<double> segment_counts(const FlowState& state, const NetworkSnapshot& snapshot) {
  const auto& segments = snapshot.segments();
  std::vector<double> counts(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    counts[i] = segments[i].lanes * state.density[i] * state.speed_kmh[i];
  }
  return counts;
}

}  // namespace odscale
