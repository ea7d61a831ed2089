#pragma once

#include <span>
#include <vector>

#include "odscale/network.hpp"

namespace odscale {

/// Fundamental-diagram constants shared by every segment, plus the bounds on
/// the demand scaling factor.
struct ModelParams {
  double k_jam = 100.0;  // veh/km/lane
  double kappa = 0.0;    // demand-to-density conversion, scenario supplied
  double alpha1 = 2.0;
  double alpha2 = 2.0;
  double x_lower = 1.0;
  double x_upper = 100.0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Throws InvalidParams unless k_jam, kappa > 0, alpha1, alpha2 >= 1 and
/// 0 <= x_lower < x_upper.
void validate(const ModelParams& params);

/// Network state at one scaling factor. Segment vectors follow
/// snapshot.segments(), path vectors follow snapshot.paths(). Travel times
/// are held in hours.
struct FlowState {
  double x = 0.0;
  std::vector<double> demand_vph;        // lambda_i
  std::vector<double> density;           // k_i, veh/km/lane
  std::vector<double> speed_kmh;         // v_i
  std::vector<double> travel_time_h;     // t_p
  std::vector<double> dtravel_time_dx;   // dt_p/dx, h per unit x
};

/// Speed from the fundamental diagram for a given density ratio k/k_jam.
/// Ratios above 1 are clamped to the jam plateau (v = v_min).
double fd_speed(double density_ratio, double v_min, double v_max, double alpha1, double alpha2);

/// dv/dk for a given density ratio; zero on the clamped plateau.
double fd_speed_slope(double density_ratio, double v_min, double v_max, double k_jam, double alpha1,
                      double alpha2);

/// Repeated evaluation of path travel times on fixed inputs. Holds per-segment
/// scratch space, so one instance must not be shared between threads.
class FlowEvaluator {
public:
  FlowEvaluator(const NetworkSnapshot& snapshot, const ModelParams& params, std::span<const double> coefficients);

  /// Travel time (h) and dt/dx of a single path after the last load().
  double path_time(std::size_t path) const;
  double path_time_derivative(std::size_t path) const;

  /// Recomputes per-segment times for x. Does not check bounds.
  void load(double x);

  const NetworkSnapshot& snapshot() const noexcept { return *snapshot_; }

private:
  const NetworkSnapshot* snapshot_;
  ModelParams params_;
  std::vector<double> coefficients_;
  std::vector<double> density_per_demand_;
  std::vector<double> segment_time_h_;
  std::vector<double> segment_dt_dx_;
};

/// Evaluates segment demand, density, speed, path travel times and their
/// exact derivative with respect to x.
///
/// Throws XOutOfBounds when x lies outside [x_lower, x_upper] and
/// NonFiniteResult if any produced quantity is NaN or infinite.
FlowState load_network(const NetworkSnapshot& snapshot, const ModelParams& params,
                       std::span<const double> coefficients, double x);

/// dt_p/dx for every path, in hours per unit x.
std::vector<double> travel_time_derivative(const NetworkSnapshot& snapshot, const ModelParams& params,
                                           std::span<const double> coefficients, double x);

/// q_i = n_i * k_i * v_i in veh/h, indexed like snapshot.segments().
std::vector<double> segment_counts(const FlowState& state, const NetworkSnapshot& snapshot);

inline constexpr double kSecondsPerHour = 3600.0;

}  // namespace odscale
