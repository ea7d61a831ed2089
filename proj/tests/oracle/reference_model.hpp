#pragma once

// Straight-line long double re-implementation of the network model, written
// independently of the library: dense assignment matrix, linear id lookups,
// no caching. Used only to cross-check the library in tests.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "odscale/estimator.hpp"
#include "odscale/network.hpp"

namespace oracle {

using Real = long double;

struct Instance {
  std::vector<odscale::Segment> segments;
  std::vector<odscale::Path> paths;
  std::vector<odscale::OdPair> od_pairs;
  Real k_jam = 100;
  Real kappa = 0;
  Real alpha1 = 2;
  Real alpha2 = 2;
};

inline std::size_t find_segment(const Instance& in, const std::string& id) {
  for (std::size_t i = 0; i < in.segments.size(); ++i) {
    if (in.segments[i].id == id) return i;
  }
  throw std::logic_error("unknown segment " + id);
}

inline std::size_t find_path(const Instance& in, const std::string& id) {
  for (std::size_t p = 0; p < in.paths.size(); ++p) {
    if (in.paths[p].id == id) return p;
  }
  throw std::logic_error("unknown path " + id);
}

// A[i][j] = 1 when OD j's path uses segment i.
inline std::vector<std::vector<Real>> assignment(const Instance& in) {
  std::vector<std::vector<Real>> a(in.segments.size(), std::vector<Real>(in.od_pairs.size(), 0));
  for (std::size_t j = 0; j < in.od_pairs.size(); ++j) {
    const auto& path = in.paths[find_path(in, in.od_pairs[j].path_id)];
    for (const auto& s : path.segment_ids) a[find_segment(in, s)][j] = 1;
  }
  return a;
}

inline std::vector<Real> segment_demand(const Instance& in, Real x) {
  const auto a = assignment(in);
  std::vector<Real> lambda(in.segments.size(), 0);
  for (std::size_t i = 0; i < in.segments.size(); ++i) {
    Real sum = 0;
    for (std::size_t j = 0; j < in.od_pairs.size(); ++j) sum += a[i][j] * in.od_pairs[j].subsample_demand_vph;
    lambda[i] = x * sum;
  }
  return lambda;
}

inline Real density(const Instance& in, std::size_t i, Real lambda) {
  return in.kappa * in.k_jam * lambda / in.segments[i].lanes;
}

inline Real speed_at_density(const Instance& in, std::size_t i, Real k) {
  const auto& s = in.segments[i];
  const Real r = std::min<Real>(k / in.k_jam, 1);
  return s.v_min_kmh + (s.v_max_kmh - s.v_min_kmh) * std::pow(1 - std::pow(r, in.alpha1), in.alpha2);
}

inline std::vector<Real> speeds(const Instance& in, Real x) {
  const auto lambda = segment_demand(in, x);
  std::vector<Real> v(in.segments.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = speed_at_density(in, i, density(in, i, lambda[i]));
  return v;
}

inline std::vector<Real> path_times_s(const Instance& in, Real x) {
  const auto v = speeds(in, x);
  std::vector<Real> t(in.paths.size(), 0);
  for (std::size_t p = 0; p < in.paths.size(); ++p) {
    for (const auto& s : in.paths[p].segment_ids) {
      const auto i = find_segment(in, s);
      t[p] += in.segments[i].length_km / v[i] * 3600;
    }
  }
  return t;
}

inline Real objective_s2(const Instance& in, const odscale::GroundTruth& gt, Real x) {
  const auto t = path_times_s(in, x);
  Real sum = 0;
  for (const auto& e : gt.entries) {
    const Real residual = static_cast<Real>(e.travel_time_h) * 3600 - t[find_path(in, e.path_id)];
    sum += e.weight * residual * residual;
  }
  return sum / gt.entries.size();
}

template <typename F>
Real central_difference(F&& f, Real x, Real h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace oracle
