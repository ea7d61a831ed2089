#include "odscale/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "odscale/csv.hpp"
#include "odscale/error.hpp"

namespace odscale {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void infeasible(const std::string& message) { throw Error(ErrorCode::InfeasibleSpec, message); }

double round_to(double value, double step) { return std::round(value / step) * step; }

std::string padded(const char* prefix, std::size_t value, std::size_t count) {
  const auto width = std::to_string(count > 0 ? count - 1 : 0).size();
  auto digits = std::to_string(value);
  return prefix + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

struct Node {
  std::size_t corridor;
  std::size_t index;
};

struct Corridor {
  std::vector<std::size_t> mainline;  // segment leaving node j toward j+1
  std::vector<std::vector<std::size_t>> off_ramps;
  std::vector<std::vector<std::pair<std::size_t, Node>>> connectors;
  std::size_t nodes() const { return mainline.size() + 1; }
};

class NetworkBuilder {
public:
  NetworkBuilder(const SyntheticSpec& spec, std::mt19937_64& rng) : spec_(spec), rng_(rng) {}

  void build() {
    const std::size_t total = spec_.segment_count;
    const std::size_t corridor_count = std::max<std::size_t>(1, total / 250);
    std::size_t ramps = std::max<std::size_t>(2 * corridor_count, static_cast<std::size_t>(std::lround(0.5 * total)));
    std::size_t connectors = 2 * (corridor_count - 1);
    if (ramps + connectors + corridor_count > total) infeasible("too few segments for the corridor layout");
    const std::size_t mainline = total - ramps - connectors;

    corridors_.resize(corridor_count);
    for (std::size_t c = 0; c < corridor_count; ++c) {
      const std::size_t links = mainline / corridor_count + (c < mainline % corridor_count ? 1 : 0);
      auto& corridor = corridors_[c];
      corridor.off_ramps.resize(links + 1);
      corridor.connectors.resize(links + 1);
      for (std::size_t j = 0; j < links; ++j) {
        corridor.mainline.push_back(add_segment("m" + std::to_string(c) + "_" + std::to_string(j), 0.3, 2.5, 2, 5,
                                                90.0, 120.0, 8.0, 20.0));
      }
    }

    // Every corridor can be entered at its first node and left at its last.
    for (std::size_t c = 0; c < corridor_count; ++c) {
      add_on_ramp({c, 0});
      add_off_ramp({c, corridors_[c].nodes() - 1});
    }
    for (std::size_t r = 2 * corridor_count; r < ramps; ++r) {
      const std::size_t c = uniform_index(corridor_count);
      const std::size_t last = corridors_[c].nodes() - 1;
      if (coin(0.5)) add_on_ramp({c, uniform_index(last)});
      else add_off_ramp({c, 1 + uniform_index(last)});
    }

    // Connectors only run toward higher-numbered corridors, so walks never cycle.
    for (std::size_t k = 0; k < connectors; ++k) {
      const std::size_t to = k < corridor_count - 1 ? k + 1 : 1 + uniform_index(corridor_count - 1);
      const std::size_t from = uniform_index(to);
      const Node source{from, uniform_index(corridors_[from].nodes())};
      const Node target{to, uniform_index(corridors_[to].nodes())};
      const auto seg = add_segment("cx" + std::to_string(k), 0.3, 1.5, 1, 2, 60.0, 90.0, 5.0, 12.0);
      corridors_[from].connectors[source.index].emplace_back(seg, target);
    }
  }

  std::vector<Path> route(std::size_t count) {
    const std::size_t lo = std::max<std::size_t>(3, spec_.min_path_segments);
    const std::size_t hi = spec_.max_path_segments;
    std::set<std::vector<std::size_t>> seen;
    std::vector<Path> paths;
    const std::size_t max_attempts = 200 * count + 1000;
    for (std::size_t attempt = 0; attempt < max_attempts && paths.size() < count; ++attempt) {
      const std::size_t target = lo + uniform_index(hi - lo + 1);
      auto walk = random_walk(target, hi);
      if (walk.empty() || !seen.insert(walk).second) continue;
      Path p{padded("p", paths.size(), count), {}};
      for (std::size_t s : walk) p.segment_ids.push_back(segments_[s].id);
      paths.push_back(std::move(p));
    }
    if (paths.size() < count) {
      infeasible("could only route " + std::to_string(paths.size()) + " distinct paths of " +
                 std::to_string(lo) + ".." + std::to_string(hi) + " segments, " + std::to_string(count) +
                 " requested");
    }
    return paths;
  }

  std::vector<Segment> take_segments() { return std::move(segments_); }

  std::size_t uniform_index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool coin(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

private:
  std::size_t add_segment(std::string id, double len_lo, double len_hi, int lanes_lo, int lanes_hi, double vmax_lo,
                          double vmax_hi, double vmin_lo, double vmin_hi) {
    Segment s;
    s.id = std::move(id);
    s.length_km = round_to(std::uniform_real_distribution<double>(len_lo, len_hi)(rng_), 0.001);
    s.lanes = std::uniform_int_distribution<int>(lanes_lo, lanes_hi)(rng_);
    s.v_max_kmh = round_to(std::uniform_real_distribution<double>(vmax_lo, vmax_hi)(rng_), 0.1);
    s.v_min_kmh = round_to(std::uniform_real_distribution<double>(vmin_lo, vmin_hi)(rng_), 0.1);
    segments_.push_back(std::move(s));
    return segments_.size() - 1;
  }

  void add_on_ramp(Node node) {
    on_ramps_.emplace_back(add_segment("on" + std::to_string(on_ramps_.size()), 0.2, 0.8, 1, 2, 50.0, 80.0, 5.0, 10.0),
                           node);
  }

  void add_off_ramp(Node node) {
    corridors_[node.corridor].off_ramps[node.index].push_back(
        add_segment("off" + std::to_string(off_count_++), 0.2, 0.8, 1, 2, 50.0, 80.0, 5.0, 10.0));
  }

  // On-ramp, at least one mainline or connector segment, off-ramp.
  std::vector<std::size_t> random_walk(std::size_t target, std::size_t max_len) {
    const auto& [start_seg, start] = on_ramps_[uniform_index(on_ramps_.size())];
    std::vector<std::size_t> walk{start_seg};
    Node at = start;
    while (true) {
      const auto& corridor = corridors_[at.corridor];
      const auto& exits = corridor.off_ramps[at.index];
      if (walk.size() >= 2 && walk.size() + 1 >= target && !exits.empty()) {
        walk.push_back(exits[uniform_index(exits.size())]);
        return walk;
      }
      if (walk.size() + 1 >= max_len) return {};
      const auto& links = corridor.connectors[at.index];
      const bool can_continue = at.index + 1 < corridor.nodes();
      if (!links.empty() && (!can_continue || coin(0.3))) {
        const auto& [seg, to] = links[uniform_index(links.size())];
        walk.push_back(seg);
        at = to;
      } else if (can_continue) {
        walk.push_back(corridor.mainline[at.index]);
        ++at.index;
      } else {
        return {};
      }
    }
  }

  const SyntheticSpec& spec_;
  std::mt19937_64& rng_;
  std::vector<Segment> segments_;
  std::vector<Corridor> corridors_;
  std::vector<std::pair<std::size_t, Node>> on_ramps_;
  std::size_t off_count_ = 0;
};

void check_spec(const SyntheticSpec& spec, std::span<const double> true_xs) {
  if (spec.segment_count < 3) infeasible("need at least 3 segments");
  if (spec.od_count < 1) infeasible("need at least one OD pair");
  if (spec.max_path_segments < 3) infeasible("paths need at least 3 segments (on-ramp, mainline, off-ramp)");
  if (spec.min_path_segments > spec.max_path_segments) infeasible("min_path_segments > max_path_segments");
  if (spec.min_path_segments > spec.segment_count) {
    infeasible("path length range [" + std::to_string(spec.min_path_segments) + ", " +
               std::to_string(spec.max_path_segments) + "] exceeds " + std::to_string(spec.segment_count) +
               " segments");
  }
  if (!(spec.noise_std_fraction >= 0.0)) infeasible("noise_std_fraction must be >= 0");
  if (!(spec.demand_min_vph >= 0.0 && spec.demand_min_vph <= spec.demand_max_vph)) infeasible("bad demand range");
  if (!(spec.peak_density_ratio > 0.0)) infeasible("peak_density_ratio must be > 0");
  if (true_xs.empty()) infeasible("no hours requested");
  for (double x : true_xs) {
    if (!(x > 0.0 && x >= spec.params.x_lower && x <= spec.params.x_upper)) {
      infeasible("true_x " + csv::format_number(x) + " outside [" + csv::format_number(spec.params.x_lower) + ", " +
                 csv::format_number(spec.params.x_upper) + "]");
    }
  }
}

double perturb(double value, double fraction, std::mt19937_64& rng) {
  if (fraction == 0.0) return value;
  const double z = std::normal_distribution<double>(0.0, 1.0)(rng);
  return std::max(value * (1.0 + fraction * z), 0.05 * value);
}

}  // namespace

SyntheticScenario synthesize(const SyntheticSpec& spec, std::span<const double> true_xs,
                             std::span<const std::string> labels) {
  check_spec(spec, true_xs);
  if (labels.size() != true_xs.size()) infeasible("one label per hour required");

  std::mt19937_64 rng(spec.rng_seed);
  NetworkBuilder builder(spec, rng);
  builder.build();
  auto paths = builder.route(spec.od_count);

  SyntheticScenario scenario;
  scenario.seed = spec.rng_seed;
  scenario.segments = builder.take_segments();
  scenario.paths = std::move(paths);

  std::vector<std::size_t> sensor_segments(scenario.segments.size());
  for (std::size_t i = 0; i < sensor_segments.size(); ++i) sensor_segments[i] = i;
  for (std::size_t i = 0; i + 1 < sensor_segments.size(); ++i) {
    std::swap(sensor_segments[i], sensor_segments[i + builder.uniform_index(sensor_segments.size() - i)]);
  }
  sensor_segments.resize(std::min(spec.sensor_count, sensor_segments.size()));
  std::sort(sensor_segments.begin(), sensor_segments.end());

  // Demands per hour, then kappa from the most loaded segment across hours.
  std::vector<std::vector<OdPair>> demand(true_xs.size());
  double peak = 0.0;
  for (std::size_t h = 0; h < true_xs.size(); ++h) {
    for (std::size_t j = 0; j < scenario.paths.size(); ++j) {
      const double d = round_to(std::uniform_real_distribution<double>(spec.demand_min_vph, spec.demand_max_vph)(rng), 0.01);
      demand[h].push_back({padded("od", j, scenario.paths.size()), scenario.paths[j].id, d});
    }
    const auto snapshot = build_snapshot(scenario.segments, scenario.paths, demand[h]);
    const auto c = segment_demand_coefficients(snapshot);
    for (std::size_t i = 0; i < c.size(); ++i) peak = std::max(peak, true_xs[h] * c[i] / scenario.segments[i].lanes);
  }
  if (!(peak > 0.0)) infeasible("generated demand is zero everywhere");

  scenario.config.params = spec.params;
  scenario.config.params.kappa = spec.peak_density_ratio / peak;
  scenario.config.options = spec.options;
  scenario.config.grid_points = spec.grid_points;
  validate(scenario.config.params);

  for (std::size_t h = 0; h < true_xs.size(); ++h) {
    SyntheticHour hour;
    hour.label = labels[h];
    hour.true_x = true_xs[h];
    hour.od_pairs = std::move(demand[h]);
    const auto snapshot = build_snapshot(scenario.segments, scenario.paths, hour.od_pairs);
    const auto c = segment_demand_coefficients(snapshot);
    const auto state = load_network(snapshot, scenario.config.params, c, hour.true_x);
    for (std::size_t p = 0; p < scenario.paths.size(); ++p) {
      hour.ground_truth.entries.push_back(
          {scenario.paths[p].id, perturb(state.travel_time_h[p], spec.noise_std_fraction, rng), 1.0});
    }
    const auto counts = segment_counts(state, snapshot);
    for (std::size_t i : sensor_segments) {
      hour.sensors.push_back({scenario.segments[i].id, perturb(counts[i], spec.noise_std_fraction, rng)});
    }
    scenario.hours.push_back(std::move(hour));
  }
  return scenario;
}

SyntheticScenario synthesize(const SyntheticSpec& spec) {
  const double x[] = {spec.true_x};
  const std::string label[] = {"all"};
  return synthesize(spec, x, label);
}

void write_scenario(const SyntheticScenario& scenario, const fs::path& dir) {
  fs::create_directories(dir);
  write_segments(dir / kSegmentsFile, scenario.segments);
  write_paths(dir / kPathsFile, scenario.paths);
  write_config(dir / kConfigFile, scenario.config);

  KeyValues manifest = {
      {"schema_version", std::to_string(kSchemaVersion)},
      {"generator", "synthetic"},
      {"seed", std::to_string(scenario.seed)},
      {"segment_count", std::to_string(scenario.segments.size())},
      {"od_count", std::to_string(scenario.paths.size())},
      {"kappa", csv::format_number(scenario.config.params.kappa)},
  };
  const bool flat = scenario.hours.size() == 1;
  for (const auto& hour : scenario.hours) {
    manifest.emplace_back(flat ? "true_x" : "true_x." + hour.label, csv::format_number(hour.true_x));
    const auto hour_dir = flat ? dir : dir / hour.label;
    write_od(hour_dir / kOdFile, hour.od_pairs);
    write_ground_truth(hour_dir / kGroundTruthFile, hour.ground_truth);
    if (!hour.sensors.empty()) write_sensors(hour_dir / kSensorsFile, hour.sensors);
    if (!flat) {
      write_key_values(hour_dir / kManifestFile, {{"schema_version", std::to_string(kSchemaVersion)},
                                                  {"hour", hour.label},
                                                  {"seed", std::to_string(scenario.seed)},
                                                  {"true_x", csv::format_number(hour.true_x)}});
    }
  }
  write_key_values(dir / kManifestFile, manifest);
}

std::vector<ScenarioBundle> generate_synthetic(const SyntheticSpec& spec, const fs::path& dir) {
  write_scenario(synthesize(spec), dir);
  return discover_bundles(dir);
}

}  // namespace odscale
