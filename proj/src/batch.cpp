#include "odscale/batch.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "odscale/csv.hpp"
#include "odscale/error.hpp"
#include "odscale/metrics.hpp"

namespace odscale {

namespace fs = std::filesystem;
using csv::format_number;

namespace {

std::ofstream open_report(const fs::path& file) {
  fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + file.string());
  return out;
}

std::string format_pct(const std::optional<double>& pct) {
  return pct ? std::to_string(metrics::round_report(*pct)) : "NA";
}

std::string format_short(double value) {
  std::ostringstream s;
  s << std::setprecision(6) << value;
  return s.str();
}

/// Aligned plain-text table; the first column is left aligned.
void write_text_table(const fs::path& file, const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = header[c].size();
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  auto out = open_report(file);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c) out << "  ";
      if (c == 0) out << std::left;
      else out << std::right;
      out << std::setw(static_cast<int>(width[c])) << cells[c];
    }
    out << '\n';
  };
  line(header);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 2 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) line(row);
}

void write_csv(const fs::path& file, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto out = open_report(file);
  csv::write_row(out, header);
  for (const auto& row : rows) csv::write_row(out, row);
}

ModelParams widened_to(ModelParams params, double x) {
  params.x_lower = std::min(params.x_lower, x);
  params.x_upper = std::max(params.x_upper, x);
  return params;
}

/// Predicted travel times (s) of every path at x, allowed outside the
/// estimation bounds (the baseline sits at x = 1 whatever the bounds).
std::vector<double> travel_times_at(const NetworkSnapshot& snapshot, const ModelParams& params, double x) {
  const auto c = segment_demand_coefficients(snapshot);
  const auto state = load_network(snapshot, widened_to(params, x), c, x);
  std::vector<double> seconds;
  seconds.reserve(state.travel_time_h.size());
  for (double t : state.travel_time_h) seconds.push_back(t * kSecondsPerHour);
  return seconds;
}

metrics::PairedObservations travel_time_pairs(const NetworkSnapshot& snapshot, const GroundTruth& gt,
                                              std::span<const double> predicted_s) {
  metrics::PairedObservations obs{metrics::ObservationKind::TravelTimes, {}};
  for (const auto& e : gt.entries) {
    const auto p = *snapshot.path_index(e.path_id);
    obs.entries.push_back({e.path_id, e.travel_time_h * kSecondsPerHour, predicted_s[p]});
  }
  return obs;
}

void write_scatter(const fs::path& file, const metrics::PairedObservations& obs) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& e : obs.entries) rows.push_back({format_number(e.ground_truth), format_number(e.estimate)});
  write_csv(file, {"gt_s", "estimate_s"}, rows);
}

void write_cdf(const fs::path& file, std::span<const double> values) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& [v, frac] : metrics::empirical_cdf(values)) rows.push_back({format_number(v), format_number(frac)});
  write_csv(file, {"travel_time_s", "cdf"}, rows);
}

std::vector<double> estimates_of(const metrics::PairedObservations& obs) {
  std::vector<double> v;
  for (const auto& e : obs.entries) v.push_back(e.estimate);
  return v;
}

std::vector<double> ground_truth_of(const metrics::PairedObservations& obs) {
  std::vector<double> v;
  for (const auto& e : obs.entries) v.push_back(e.ground_truth);
  return v;
}

void write_estimate_details(const fs::path& dir, const Scenario& scenario, const EstimationResult& result) {
  const auto& snapshot = scenario.snapshot;
  {
    const auto scaled = apply_scaling(snapshot.od_pairs(), result.x_star);
    write_od(dir / "upscaled_od.csv", scaled);
  }
  {
    std::vector<std::optional<double>> gt_s(snapshot.paths().size());
    for (const auto& e : scenario.ground_truth.entries) {
      gt_s[*snapshot.path_index(e.path_id)] = e.travel_time_h * kSecondsPerHour;
    }
    std::vector<std::vector<std::string>> rows;
    for (std::size_t p = 0; p < snapshot.paths().size(); ++p) {
      rows.push_back({snapshot.paths()[p].id, gt_s[p] ? format_number(*gt_s[p]) : "",
                      format_number(result.predicted_travel_times_s[p])});
    }
    write_csv(dir / "travel_times.csv", {"path_id", "gt_s", "predicted_s"}, rows);
  }
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& t : result.trace) rows.push_back({format_number(t.x), format_number(t.f), format_number(t.df)});
    write_csv(dir / "trace.csv", {"x", "f", "df"}, rows);
  }
}

struct HourEstimate {
  std::string hour;
  EstimationResult result;
};

}  // namespace

std::optional<double> reported_pct_improvement(double nrmse_baseline, double nrmse_model) {
  const auto base = static_cast<double>(metrics::round_report(nrmse_baseline));
  const auto model = static_cast<double>(metrics::round_report(nrmse_model));
  if (base == 0.0) return model == 0.0 ? std::optional<double>(0.0) : std::nullopt;
  return metrics::pct_improvement(base, model);
}

std::optional<double> reported_pct_gap(double nrmse_proposed, double nrmse_benchmark) {
  const auto proposed = static_cast<double>(metrics::round_report(nrmse_proposed));
  const auto bench = static_cast<double>(metrics::round_report(nrmse_benchmark));
  if (bench == 0.0) return proposed == 0.0 ? std::optional<double>(0.0) : std::nullopt;
  return metrics::pct_gap(proposed, bench);
}

bool BatchSummary::all_ok() const {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.ok; });
}

CountValidation export_counts_validation(const NetworkSnapshot& snapshot, const ModelParams& params,
                                         const EstimationResult& result, std::span<const SensorCount> sensors,
                                         const fs::path& out_dir, const std::string& hour) {
  if (sensors.empty()) throw Error(ErrorCode::NoSensors, "no sensor counts for hour '" + hour + "'");
  const auto c = segment_demand_coefficients(snapshot);
  const auto proposed = segment_counts(load_network(snapshot, widened_to(params, result.x_star), c, result.x_star), snapshot);
  const auto baseline = segment_counts(load_network(snapshot, widened_to(params, 1.0), c, 1.0), snapshot);

  CountValidation validation;
  validation.hour = hour;
  metrics::PairedObservations proposed_obs{metrics::ObservationKind::Counts, {}};
  metrics::PairedObservations baseline_obs{metrics::ObservationKind::Counts, {}};
  for (const auto& s : sensors) {
    const auto i = snapshot.segment_index(s.segment_id);
    if (!i) throw Error(ErrorCode::SchemaError, "sensor on unknown segment '" + s.segment_id + "'");
    validation.rows.push_back({s.segment_id, snapshot.segments()[*i].lanes, s.count_vph, proposed[*i], baseline[*i],
                               c[*i] == 0.0});
    proposed_obs.entries.push_back({s.segment_id, s.count_vph, proposed[*i]});
    baseline_obs.entries.push_back({s.segment_id, s.count_vph, baseline[*i]});
  }
  validation.proposed_nrmse = metrics::nrmse(proposed_obs);
  validation.baseline_nrmse = metrics::nrmse(baseline_obs);
  validation.pct_improvement = reported_pct_improvement(validation.baseline_nrmse, validation.proposed_nrmse);

  std::vector<std::vector<std::string>> rows;
  for (const auto& r : validation.rows) {
    rows.push_back({r.segment_id, std::to_string(r.lanes), format_number(r.gt_count_vph),
                    format_number(r.proposed_count_vph), format_number(r.baseline_count_vph),
                    r.unloaded ? "1" : "0"});
  }
  write_csv(out_dir / "counts_validation.csv",
            {"segment_id", "lanes", "gt_count_vph", "proposed_count_vph", "baseline_count_vph", "unloaded"}, rows);
  return validation;
}

BatchSummary run_batch(std::span<const ScenarioBundle> bundles, BatchMode mode, const fs::path& out_dir,
                       const BatchOptions& options) {
  fs::create_directories(out_dir);
  if (bundles.empty()) std::cerr << "warning: no scenario bundles found; writing empty reports\n";

  BatchSummary summary;
  std::vector<HourEstimate> estimates;
  std::vector<std::vector<std::string>> grid_rows;
  std::vector<std::vector<std::string>> evaluation_rows;
  std::vector<CountValidationRow> pooled_counts;

  for (const auto& bundle : bundles) {
    BundleOutcome outcome{bundle.hour, false, {}};
    try {
      const auto scenario = parse_scenario(bundle);
      const auto& snapshot = scenario.snapshot;
      const auto& params = scenario.config.params;
      const auto hour_dir = out_dir / bundle.hour;
      const std::size_t points = options.grid_points.value_or(scenario.config.grid_points);

      if (mode == BatchMode::GridSearch) {
        const auto grid = grid_search_benchmark(snapshot, params, scenario.ground_truth,
                                                {params.x_lower, params.x_upper, points});
        std::vector<std::vector<std::string>> curve;
        for (const auto& [x, f] : grid.curve) curve.push_back({format_number(x), format_number(f)});
        write_csv(hour_dir / "objective_curve.csv", {"x", "f"}, curve);
        grid_rows.push_back({bundle.hour, format_number(grid.x_bench), format_number(grid.f_bench), std::to_string(points)});
      } else {
        auto result = estimate(snapshot, params, scenario.ground_truth, scenario.config.options);
        write_estimate_details(hour_dir, scenario, result);

        if (mode == BatchMode::Evaluate || mode == BatchMode::Compare) {
          const auto baseline = travel_time_pairs(snapshot, scenario.ground_truth, travel_times_at(snapshot, params, 1.0));
          const auto proposed = travel_time_pairs(snapshot, scenario.ground_truth, result.predicted_travel_times_s);
          TravelTimeComparison cmp;
          cmp.hour = bundle.hour;
          cmp.x_proposed = result.x_star;
          cmp.baseline_nrmse = metrics::nrmse(baseline);
          cmp.proposed_nrmse = metrics::nrmse(proposed);
          cmp.pct_improvement = reported_pct_improvement(cmp.baseline_nrmse, cmp.proposed_nrmse);
          write_scatter(hour_dir / "scatter_baseline.csv", baseline);
          write_scatter(hour_dir / "scatter_proposed.csv", proposed);
          write_cdf(hour_dir / "cdf_gt.csv", ground_truth_of(baseline));
          write_cdf(hour_dir / "cdf_baseline.csv", estimates_of(baseline));
          write_cdf(hour_dir / "cdf_proposed.csv", estimates_of(proposed));

          if (mode == BatchMode::Compare) {
            const auto grid = grid_search_benchmark(snapshot, params, scenario.ground_truth,
                                                    {params.x_lower, params.x_upper, points});
            const auto benchmark =
                travel_time_pairs(snapshot, scenario.ground_truth, travel_times_at(snapshot, params, grid.x_bench));
            cmp.x_benchmark = grid.x_bench;
            cmp.benchmark_nrmse = metrics::nrmse(benchmark);
            cmp.pct_gap = reported_pct_gap(cmp.proposed_nrmse, cmp.benchmark_nrmse);
            write_scatter(hour_dir / "scatter_benchmark.csv", benchmark);
            write_cdf(hour_dir / "cdf_benchmark.csv", estimates_of(benchmark));
          } else {
            evaluation_rows.push_back({bundle.hour, format_number(result.x_star), format_number(cmp.baseline_nrmse),
                                       format_number(cmp.proposed_nrmse), format_pct(cmp.pct_improvement)});
          }
          summary.comparisons.push_back(cmp);
        }

        if (mode == BatchMode::ValidateCounts) {
          if (!bundle.sensors) throw Error(ErrorCode::NoSensors, "no " + std::string(kSensorsFile) + " for hour '" + bundle.hour + "'");
          const auto sensors = read_sensors(*bundle.sensors);
          auto validation = export_counts_validation(snapshot, params, result, sensors, hour_dir, bundle.hour);
          pooled_counts.insert(pooled_counts.end(), validation.rows.begin(), validation.rows.end());
          summary.validations.push_back(std::move(validation));
        }
        estimates.push_back({bundle.hour, std::move(result)});
      }
      outcome.ok = true;
    } catch (const std::exception& e) {
      outcome.error = e.what();
      std::cerr << "error: hour '" << bundle.hour << "': " << e.what() << '\n';
    }
    summary.outcomes.push_back(std::move(outcome));
  }

  // Reports.
  {
    std::vector<std::vector<std::string>> rows;
    for (const auto& o : summary.outcomes) {
      if (!o.ok) rows.push_back({o.hour, o.error});
    }
    write_csv(out_dir / "failures.csv", {"hour", "error"}, rows);
  }

  if (mode == BatchMode::GridSearch) {
    const std::vector<std::string> header = {"hour", "x_bench", "objective_s2", "grid_points"};
    write_csv(out_dir / "grid_search.csv", header, grid_rows);
    write_text_table(out_dir / "grid_search.txt", header, grid_rows);
    return summary;
  }

  {
    const std::vector<std::string> header = {"hour", "x_star", "objective_s2", "iterations", "converged"};
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> text_rows;
    nlohmann::json json = nlohmann::json::array();
    for (const auto& [hour, r] : estimates) {
      rows.push_back({hour, format_number(r.x_star), format_number(r.objective_value), std::to_string(r.iterations),
                      r.converged ? "1" : "0"});
      text_rows.push_back({hour, format_short(r.x_star), format_short(r.objective_value), std::to_string(r.iterations),
                           r.converged ? "yes" : "no"});
      json.push_back({{"hour", hour},
                      {"x_star", r.x_star},
                      {"objective_s2", r.objective_value},
                      {"iterations", r.iterations},
                      {"converged", r.converged},
                      {"evaluations", r.trace.size()}});
    }
    write_csv(out_dir / "estimates.csv", header, rows);
    write_text_table(out_dir / "estimates.txt", header, text_rows);
    open_report(out_dir / "estimates.json") << json.dump(2) << '\n';
  }

  if (mode == BatchMode::Evaluate) {
    const std::vector<std::string> header = {"hour", "x_star", "baseline_nrmse", "proposed_nrmse", "pct_improvement"};
    write_csv(out_dir / "evaluation.csv", header, evaluation_rows);
    std::vector<std::vector<std::string>> text_rows;
    for (const auto& c : summary.comparisons) {
      text_rows.push_back({c.hour, format_short(c.x_proposed), std::to_string(metrics::round_report(c.baseline_nrmse)),
                           std::to_string(metrics::round_report(c.proposed_nrmse)), format_pct(c.pct_improvement)});
    }
    write_text_table(out_dir / "evaluation.txt", header, text_rows);
  }

  if (mode == BatchMode::Compare) {
    const std::vector<std::string> header = {"hour", "baseline_nrmse", "benchmark_nrmse", "proposed_nrmse",
                                             "pct_improvement", "pct_gap"};
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> text_rows;
    nlohmann::json json = nlohmann::json::array();
    for (const auto& c : summary.comparisons) {
      rows.push_back({c.hour, format_number(c.baseline_nrmse), format_number(c.benchmark_nrmse),
                      format_number(c.proposed_nrmse), format_pct(c.pct_improvement), format_pct(c.pct_gap)});
      text_rows.push_back({c.hour, std::to_string(metrics::round_report(c.baseline_nrmse)),
                           std::to_string(metrics::round_report(c.benchmark_nrmse)),
                           std::to_string(metrics::round_report(c.proposed_nrmse)), format_pct(c.pct_improvement),
                           format_pct(c.pct_gap)});
      auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
      json.push_back({{"hour", c.hour},
                      {"x_baseline", c.x_baseline},
                      {"x_benchmark", c.x_benchmark},
                      {"x_proposed", c.x_proposed},
                      {"baseline_nrmse", c.baseline_nrmse},
                      {"benchmark_nrmse", c.benchmark_nrmse},
                      {"proposed_nrmse", c.proposed_nrmse},
                      {"pct_improvement", opt(c.pct_improvement)},
                      {"pct_gap", opt(c.pct_gap)}});
    }
    write_csv(out_dir / "compare.csv", header, rows);
    write_text_table(out_dir / "compare.txt", header, text_rows);
    open_report(out_dir / "compare.json") << json.dump(2) << '\n';
  }

  if (mode == BatchMode::ValidateCounts) {
    const std::vector<std::string> header = {"hour", "sensors", "baseline_nrmse", "proposed_nrmse", "pct_improvement"};
    std::vector<std::vector<std::string>> rows;
    std::vector<std::vector<std::string>> text_rows;
    auto add = [&](const std::string& label, std::size_t n, double base, double prop, const std::optional<double>& pct) {
      rows.push_back({label, std::to_string(n), format_number(base), format_number(prop), format_pct(pct)});
      text_rows.push_back({label, std::to_string(n), std::to_string(metrics::round_report(base)),
                           std::to_string(metrics::round_report(prop)), format_pct(pct)});
    };
    for (const auto& v : summary.validations) {
      add(v.hour, v.rows.size(), v.baseline_nrmse, v.proposed_nrmse, v.pct_improvement);
    }
    // All hours and sensors pooled into one scope.
    if (summary.validations.size() > 1) {
      metrics::PairedObservations base{metrics::ObservationKind::Counts, {}};
      metrics::PairedObservations prop{metrics::ObservationKind::Counts, {}};
      for (const auto& r : pooled_counts) {
        base.entries.push_back({r.segment_id, r.gt_count_vph, r.baseline_count_vph});
        prop.entries.push_back({r.segment_id, r.gt_count_vph, r.proposed_count_vph});
      }
      const double b = metrics::nrmse(base);
      const double p = metrics::nrmse(prop);
      add("pooled", pooled_counts.size(), b, p, reported_pct_improvement(b, p));
    }
    write_csv(out_dir / "counts_validation.csv", header, rows);
    write_text_table(out_dir / "counts_validation.txt", header, text_rows);
  }
  return summary;
}

}  // namespace odscale
