#include "odscale/scenario_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <system_error>

#include "odscale/csv.hpp"
#include "odscale/error.hpp"

namespace odscale {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema_error(const std::string& where, const std::string& message) {
  throw Error(ErrorCode::SchemaError, where + ": " + message);
}

std::ofstream open_for_write(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  return out;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<fs::path> existing(const fs::path& file) {
  if (fs::exists(file)) return file;
  return std::nullopt;
}

}  // namespace

std::vector<Segment> read_segments(const fs::path& file) {
  const auto table = csv::Table::read(file);
  table.require_columns({"id", "length_km", "lanes", "v_max_kmh", "v_min_kmh"});
  std::vector<Segment> segments;
  segments.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    Segment s;
    s.id = table.text(row, "id");
    if (s.id.empty()) schema_error(table.where(row, "id"), "id must not be empty");
    s.length_km = table.number(row, "length_km");
    const long long lanes = table.integer(row, "lanes");
    s.v_max_kmh = table.number(row, "v_max_kmh");
    s.v_min_kmh = table.number(row, "v_min_kmh");
    if (!(std::isfinite(s.length_km) && s.length_km > 0.0)) schema_error(table.where(row, "length_km"), "violates length_km > 0");
    if (lanes < 1 || lanes > 1000) schema_error(table.where(row, "lanes"), "violates lanes >= 1");
    s.lanes = static_cast<int>(lanes);
    if (!(std::isfinite(s.v_min_kmh) && s.v_min_kmh > 0.0)) schema_error(table.where(row, "v_min_kmh"), "violates v_min_kmh > 0");
    if (!(std::isfinite(s.v_max_kmh) && s.v_max_kmh > s.v_min_kmh)) {
      schema_error(table.where(row, "v_max_kmh"), "violates v_min_kmh < v_max_kmh");
    }
    segments.push_back(std::move(s));
  }
  return segments;
}

std::vector<Path> read_paths(const fs::path& file) {
  const auto table = csv::Table::read(file);
  table.require_columns({"path_id", "seq", "segment_id"});
  // Paths keep the order of their first appearance; segments are ordered by seq.
  std::vector<std::string> order;
  std::map<std::string, std::map<long long, std::string>> by_path;
  for (const auto& row : table.rows()) {
    const auto path_id = table.text(row, "path_id");
    if (path_id.empty()) schema_error(table.where(row, "path_id"), "path_id must not be empty");
    const long long seq = table.integer(row, "seq");
    const auto segment_id = table.text(row, "segment_id");
    if (segment_id.empty()) schema_error(table.where(row, "segment_id"), "segment_id must not be empty");
    auto [it, inserted] = by_path.try_emplace(path_id);
    if (inserted) order.push_back(path_id);
    if (!it->second.emplace(seq, segment_id).second) {
      schema_error(table.where(row, "seq"), "seq " + std::to_string(seq) + " repeated in path '" + path_id + "'");
    }
  }
  std::vector<Path> paths;
  paths.reserve(order.size());
  for (const auto& id : order) {
    Path p{id, {}};
    for (const auto& [seq, segment] : by_path[id]) p.segment_ids.push_back(segment);
    paths.push_back(std::move(p));
  }
  return paths;
}

std::vector<OdPair> read_od(const fs::path& file) {
  const auto table = csv::Table::read(file);
  table.require_columns({"od_id", "path_id", "demand_vph"});
  std::vector<OdPair> ods;
  ods.reserve(table.rows().size());
  for (const auto& row : table.rows()) {
    OdPair od{table.text(row, "od_id"), table.text(row, "path_id"), table.number(row, "demand_vph")};
    if (od.id.empty()) schema_error(table.where(row, "od_id"), "od_id must not be empty");
    if (!(std::isfinite(od.subsample_demand_vph) && od.subsample_demand_vph >= 0.0)) {
      schema_error(table.where(row, "demand_vph"), "violates demand_vph >= 0");
    }
    ods.push_back(std::move(od));
  }
  return ods;
}

std::vector<AssignmentEntry> read_assignment(const fs::path& file) {
  const auto table = csv::Table::read(file);
  table.require_columns({"segment_id", "od_id", "probability"});
  std::vector<AssignmentEntry> entries;
  for (const auto& row : table.rows()) {
    AssignmentEntry e{table.text(row, "segment_id"), table.text(row, "od_id"), table.number(row, "probability")};
    if (!(e.probability >= 0.0 && e.probability <= 1.0)) {
      schema_error(table.where(row, "probability"), "violates 0 <= probability <= 1");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

GroundTruth read_ground_truth(const fs::path& file) {
  const auto table = csv::Table::read(file);
  static const std::map<std::string, double, std::less<>> kUnitsPerHour = {
      {"tt_s", kSecondsPerHour}, {"tt_min", 60.0}, {"tt_h", 1.0}};

  std::optional<std::string> tt_column;
  for (const auto& name : table.header()) {
    if (name.rfind("tt_", 0) != 0) continue;
    if (!kUnitsPerHour.contains(name)) {
      throw Error(ErrorCode::UnitError, table.source() + ": unrecognized travel time unit in column '" + name + "'");
    }
    if (tt_column) schema_error(table.source(), "more than one travel time column");
    tt_column = name;
  }
  if (!tt_column) schema_error(table.source(), "missing required column 'tt_s'");
  table.require_columns({"path_id", *tt_column}, {"weight"});
  const double units_per_hour = kUnitsPerHour.find(*tt_column)->second;
  const bool has_weight = table.column_index("weight").has_value();

  GroundTruth gt;
  std::set<std::string> seen;
  for (const auto& row : table.rows()) {
    GroundTruth::Entry e;
    e.path_id = table.text(row, "path_id");
    if (!seen.insert(e.path_id).second) schema_error(table.where(row, "path_id"), "path '" + e.path_id + "' listed twice");
    const double tt = table.number(row, *tt_column);
    if (!(std::isfinite(tt) && tt > 0.0)) schema_error(table.where(row, *tt_column), "violates " + *tt_column + " > 0");
    e.travel_time_h = tt / units_per_hour;
    if (has_weight) {
      e.weight = table.number(row, "weight");
      if (!(std::isfinite(e.weight) && e.weight >= 0.0)) schema_error(table.where(row, "weight"), "violates weight >= 0");
    }
    gt.entries.push_back(std::move(e));
  }
  return gt;
}

std::vector<SensorCount> read_sensors(const fs::path& file) {
  const auto table = csv::Table::read(file);
  table.require_columns({"segment_id", "count_vph"});
  std::vector<SensorCount> sensors;
  std::set<std::string> seen;
  for (const auto& row : table.rows()) {
    SensorCount s{table.text(row, "segment_id"), table.number(row, "count_vph")};
    if (!seen.insert(s.segment_id).second) {
      schema_error(table.where(row, "segment_id"), "segment '" + s.segment_id + "' listed twice");
    }
    if (!(std::isfinite(s.count_vph) && s.count_vph >= 0.0)) {
      schema_error(table.where(row, "count_vph"), "violates count_vph >= 0");
    }
    sensors.push_back(std::move(s));
  }
  if (sensors.empty()) throw Error(ErrorCode::NoSensors, table.source() + ": no sensor rows");
  return sensors;
}

KeyValues read_key_values(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + file.string());
  KeyValues values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, file.string() + ":" + std::to_string(line_no) + ":1: expected key=value");
    }
    auto key = trim(content.substr(0, eq));
    if (key.empty()) throw Error(ErrorCode::ParseError, file.string() + ":" + std::to_string(line_no) + ":1: empty key");
    values.emplace_back(std::move(key), trim(content.substr(eq + 1)));
  }
  return values;
}

void write_key_values(const fs::path& file, const KeyValues& values) {
  auto out = open_for_write(file);
  for (const auto& [key, value] : values) out << key << '=' << value << '\n';
}

ScenarioConfig read_config(const fs::path& file) {
  ScenarioConfig config;
  bool have_kappa = false;
  std::set<std::string> seen;
  const auto values = read_key_values(file);

  auto as_double = [&](const std::string& key, const std::string& value) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(v)) {
      throw Error(ErrorCode::ParseError, file.string() + ": '" + key + "' is not a number: '" + value + "'");
    }
    return v;
  };
  auto as_int = [&](const std::string& key, const std::string& value) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
      throw Error(ErrorCode::ParseError, file.string() + ": '" + key + "' is not an integer: '" + value + "'");
    }
    return v;
  };

  for (const auto& [key, value] : values) {
    if (!seen.insert(key).second) schema_error(file.string(), "key '" + key + "' given twice");
    if (key == "k_jam") config.params.k_jam = as_double(key, value);
    else if (key == "kappa") config.params.kappa = as_double(key, value), have_kappa = true;
    else if (key == "alpha1") config.params.alpha1 = as_double(key, value);
    else if (key == "alpha2") config.params.alpha2 = as_double(key, value);
    else if (key == "x_lower") config.params.x_lower = as_double(key, value);
    else if (key == "x_upper") config.params.x_upper = as_double(key, value);
    else if (key == "seeds") config.options.seeds = static_cast<int>(as_int(key, value));
    else if (key == "max_iterations") config.options.max_iterations = static_cast<int>(as_int(key, value));
    else if (key == "tol_x_rel") config.options.tol_x_rel = as_double(key, value);
    else if (key == "tol_g") config.options.tol_g = as_double(key, value);
    else if (key == "tol_f") config.options.tol_f = as_double(key, value);
    else if (key == "grid_points") {
      const auto n = as_int(key, value);
      if (n < 1) schema_error(file.string(), "violates grid_points >= 1");
      config.grid_points = static_cast<std::size_t>(n);
    } else {
      schema_error(file.string(), "unknown key '" + key + "'");
    }
  }
  if (!have_kappa) schema_error(file.string(), "kappa is required");
  if (config.options.seeds < 2) schema_error(file.string(), "violates seeds >= 2");
  if (config.options.max_iterations < 1) schema_error(file.string(), "violates max_iterations >= 1");
  try {
    validate(config.params);
  } catch (const Error& e) {
    schema_error(file.string(), e.what());
  }
  return config;
}

void write_config(const fs::path& file, const ScenarioConfig& c) {
  using csv::format_number;
  write_key_values(file, {
                             {"k_jam", format_number(c.params.k_jam)},
                             {"kappa", format_number(c.params.kappa)},
                             {"alpha1", format_number(c.params.alpha1)},
                             {"alpha2", format_number(c.params.alpha2)},
                             {"x_lower", format_number(c.params.x_lower)},
                             {"x_upper", format_number(c.params.x_upper)},
                             {"seeds", std::to_string(c.options.seeds)},
                             {"max_iterations", std::to_string(c.options.max_iterations)},
                             {"tol_x_rel", format_number(c.options.tol_x_rel)},
                             {"tol_g", format_number(c.options.tol_g)},
                             {"tol_f", format_number(c.options.tol_f)},
                             {"grid_points", std::to_string(c.grid_points)},
                         });
}

void write_segments(const fs::path& file, std::span<const Segment> segments) {
  auto out = open_for_write(file);
  csv::write_row(out, {"id", "length_km", "lanes", "v_max_kmh", "v_min_kmh"});
  for (const auto& s : segments) {
    csv::write_row(out, {s.id, csv::format_number(s.length_km), std::to_string(s.lanes),
                         csv::format_number(s.v_max_kmh), csv::format_number(s.v_min_kmh)});
  }
}

void write_paths(const fs::path& file, std::span<const Path> paths) {
  auto out = open_for_write(file);
  csv::write_row(out, {"path_id", "seq", "segment_id"});
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.segment_ids.size(); ++k) {
      csv::write_row(out, {p.id, std::to_string(k), p.segment_ids[k]});
    }
  }
}

void write_od(const fs::path& file, std::span<const OdPair> od_pairs) {
  auto out = open_for_write(file);
  csv::write_row(out, {"od_id", "path_id", "demand_vph"});
  for (const auto& od : od_pairs) csv::write_row(out, {od.id, od.path_id, csv::format_number(od.subsample_demand_vph)});
}

void write_assignment(const fs::path& file, std::span<const AssignmentEntry> entries) {
  auto out = open_for_write(file);
  csv::write_row(out, {"segment_id", "od_id", "probability"});
  for (const auto& e : entries) csv::write_row(out, {e.segment_id, e.od_id, csv::format_number(e.probability)});
}

void write_ground_truth(const fs::path& file, const GroundTruth& gt) {
  auto out = open_for_write(file);
  csv::write_row(out, {"path_id", "tt_s", "weight"});
  for (const auto& e : gt.entries) {
    csv::write_row(out, {e.path_id, csv::format_number(e.travel_time_h * kSecondsPerHour), csv::format_number(e.weight)});
  }
}

void write_sensors(const fs::path& file, std::span<const SensorCount> sensors) {
  auto out = open_for_write(file);
  csv::write_row(out, {"segment_id", "count_vph"});
  for (const auto& s : sensors) csv::write_row(out, {s.segment_id, csv::format_number(s.count_vph)});
}

Scenario parse_scenario(const ScenarioBundle& bundle) {
  auto segments = read_segments(bundle.segments);
  auto paths = read_paths(bundle.paths);
  auto ods = read_od(bundle.od);
  std::optional<std::vector<AssignmentEntry>> assignment;
  if (bundle.assignment) assignment = read_assignment(*bundle.assignment);
  auto config = read_config(bundle.config);
  auto gt = read_ground_truth(bundle.ground_truth);

  Scenario scenario{NetworkSnapshot{}, std::move(config), std::move(gt)};
  try {
    scenario.snapshot = build_snapshot(std::move(segments), std::move(paths), std::move(ods), std::move(assignment));
  } catch (const Error& e) {
    schema_error(bundle.hour.empty() ? bundle.od.string() : "hour " + bundle.hour, e.what());
  }
  for (const auto& entry : scenario.ground_truth.entries) {
    if (!scenario.snapshot.path_index(entry.path_id)) {
      schema_error(bundle.ground_truth.string(), "unknown path '" + entry.path_id + "'");
    }
  }
  return scenario;
}

std::vector<ScenarioBundle> discover_bundles(const fs::path& dir, const std::optional<fs::path>& config_override,
                                             const std::optional<std::string>& hour_filter,
                                             const std::string& single_label) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::IoError, "not a directory: " + dir.string());

  auto make = [&](const fs::path& hour_dir, std::string label) {
    auto pick = [&](const char* name) {
      auto local = hour_dir / name;
      return fs::exists(local) ? local : dir / name;
    };
    ScenarioBundle b;
    b.hour = std::move(label);
    b.segments = pick(kSegmentsFile);
    b.paths = pick(kPathsFile);
    b.od = hour_dir / kOdFile;
    b.ground_truth = hour_dir / kGroundTruthFile;
    b.config = config_override ? *config_override : pick(kConfigFile);
    b.sensors = existing(hour_dir / kSensorsFile);
    b.assignment = existing(pick(kAssignmentFile));
    return b;
  };

  std::vector<ScenarioBundle> bundles;
  if (fs::exists(dir / kOdFile)) {
    bundles.push_back(make(dir, hour_filter.value_or(single_label)));
    return bundles;
  }

  std::vector<fs::path> hour_dirs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / kOdFile)) hour_dirs.push_back(entry.path());
  }
  std::sort(hour_dirs.begin(), hour_dirs.end());
  std::set<std::string> labels;
  for (const auto& h : hour_dirs) {
    auto label = h.filename().string();
    if (!labels.insert(label).second) schema_error(dir.string(), "duplicate hour label '" + label + "'");
    if (hour_filter && *hour_filter != label) continue;
    bundles.push_back(make(h, label));
  }
  if (hour_filter && bundles.empty()) {
    throw Error(ErrorCode::IoError, "no bundle for hour '" + *hour_filter + "' under " + dir.string());
  }
  return bundles;
}

}  // namespace odscale
