#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include "odscale/batch.hpp"
#include "odscale/error.hpp"
#include "odscale/metrics.hpp"
#include "odscale/synthetic.hpp"
#include "support/temp_dir.hpp"

using namespace odscale;
using testgen::read_file;
using testgen::TempDir;
using testgen::write_file;

namespace {

SyntheticSpec small_spec(std::uint64_t seed, double noise = 0.0) {
  SyntheticSpec spec;
  spec.rng_seed = seed;
  spec.segment_count = 60;
  spec.od_count = 12;
  spec.max_path_segments = 10;
  spec.noise_std_fraction = noise;
  spec.grid_points = 2001;
  return spec;
}

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(ODSCALE_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(command.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("noiseless compare reports zero gap and a baseline at x = 1") {
  TempDir dir, out;
  const std::vector<double> xs = {4.0, 11.0};
  const std::vector<std::string> labels = {"h1", "h2"};
  const auto scenario = synthesize(small_spec(3), xs, labels);
  write_scenario(scenario, dir.path());
  const auto bundles = discover_bundles(dir.path());
  const auto summary = run_batch(bundles, BatchMode::Compare, out.path());
  REQUIRE(summary.all_ok());
  REQUIRE(summary.comparisons.size() == 2);
  for (const auto& c : summary.comparisons) {
    CHECK(c.x_baseline == 1.0);
    REQUIRE(c.pct_gap.has_value());
    CHECK(metrics::round_report(*c.pct_gap) == 0);
    CHECK(c.baseline_nrmse > c.proposed_nrmse);
  }

  // Baseline nRMSE recomputed from the unscaled demand.
  const auto parsed = parse_scenario(bundles[0]);
  auto params = parsed.config.params;
  const auto state = load_network(parsed.snapshot, params, segment_demand_coefficients(parsed.snapshot), 1.0);
  metrics::PairedObservations obs{metrics::ObservationKind::TravelTimes, {}};
  for (const auto& e : parsed.ground_truth.entries) {
    obs.entries.push_back({e.path_id, e.travel_time_h, state.travel_time_h[*parsed.snapshot.path_index(e.path_id)]});
  }
  CHECK(summary.comparisons[0].baseline_nrmse == doctest::Approx(metrics::nrmse(obs)).epsilon(1e-12));

  const auto compare_csv = read_file(out / "compare.csv");
  CHECK(first_line(compare_csv) == "hour,baseline_nrmse,benchmark_nrmse,proposed_nrmse,pct_improvement,pct_gap");
  CHECK(line_count(compare_csv) == 3);
  for (const char* name : {"compare.txt", "compare.json", "estimates.csv", "h1/scatter_benchmark.csv",
                           "h2/cdf_proposed.csv", "h1/cdf_gt.csv", "h1/trace.csv", "h1/upscaled_od.csv"}) {
    CHECK_MESSAGE(std::filesystem::exists(out / name), name);
  }
  CHECK(first_line(read_file(out / "h1/scatter_proposed.csv")) == "gt_s,estimate_s");
}

TEST_CASE("batch reports are deterministic") {
  TempDir dir, a, b;
  write_scenario(synthesize(small_spec(5, 0.05)), dir.path());
  const auto bundles = discover_bundles(dir.path());
  run_batch(bundles, BatchMode::Compare, a.path());
  run_batch(bundles, BatchMode::Compare, b.path());
  for (const auto& entry : std::filesystem::recursive_directory_iterator(a.path())) {
    if (!entry.is_regular_file()) continue;
    CHECK(read_file(entry.path()) == read_file(b.path() / std::filesystem::relative(entry.path(), a.path())));
  }
}

TEST_CASE("empty batch writes header-only reports") {
  TempDir out;
  const auto summary = run_batch({}, BatchMode::Compare, out.path());
  CHECK(summary.all_ok());
  CHECK(line_count(read_file(out / "compare.csv")) == 1);
  CHECK(line_count(read_file(out / "failures.csv")) == 1);
}

TEST_CASE("a failing bundle does not stop the batch") {
  TempDir dir, out;
  const std::vector<double> xs = {4.0, 6.0};
  const std::vector<std::string> labels = {"h1", "h2"};
  write_scenario(synthesize(small_spec(8), xs, labels), dir.path());
  write_file(dir / "h1" / "od.csv", "od_id,path_id,demand_vph\nbroken,nowhere,5\n");
  const auto summary = run_batch(discover_bundles(dir.path()), BatchMode::Estimate, out.path());
  REQUIRE(summary.outcomes.size() == 2);
  CHECK_FALSE(summary.outcomes[0].ok);
  CHECK(summary.outcomes[1].ok);
  CHECK_FALSE(summary.all_ok());
  CHECK(line_count(read_file(out / "failures.csv")) == 2);
  CHECK(line_count(read_file(out / "estimates.csv")) == 2);
}

TEST_CASE("grid-search mode writes the objective curve") {
  TempDir dir, out;
  write_scenario(synthesize(small_spec(9)), dir.path());
  BatchOptions options;
  options.grid_points = 101;
  REQUIRE(run_batch(discover_bundles(dir.path()), BatchMode::GridSearch, out.path(), options).all_ok());
  CHECK(line_count(read_file(out / "all" / "objective_curve.csv")) == 102);
  CHECK(std::filesystem::exists(out / "grid_search.txt"));
}

TEST_CASE("count validation on noiseless sensors") {
  TempDir dir, out;
  const std::vector<double> xs = {6.0, 9.0};
  const std::vector<std::string> labels = {"h1", "h2"};
  write_scenario(synthesize(small_spec(12), xs, labels), dir.path());
  const auto summary = run_batch(discover_bundles(dir.path()), BatchMode::ValidateCounts, out.path());
  REQUIRE(summary.all_ok());
  REQUIRE(summary.validations.size() == 2);
  for (const auto& v : summary.validations) {
    CHECK(v.proposed_nrmse < 1e-3);
    CHECK(v.baseline_nrmse > 1.0);
  }
  const auto report = read_file(out / "counts_validation.csv");
  CHECK(line_count(report) == 4);  // header, two hours, pooled
  CHECK(report.find("\npooled,") != std::string::npos);
}

TEST_CASE("unloaded sensors are flagged and missing sensors are an error") {
  TempDir out;
  const auto snap = build_snapshot({{"a", 1.0, 2, 100.0, 10.0}, {"b", 1.0, 2, 100.0, 10.0}}, {{"p", {"a"}}},
                                   {{"od", "p", 100.0}});
  ModelParams params;
  params.kappa = 0.001;
  GroundTruth gt{{{"p", 0.011, 1.0}}};
  const auto result = estimate(snap, params, gt);
  const std::vector<SensorCount> sensors = {{"a", 500.0}, {"b", 300.0}};
  const auto v = export_counts_validation(snap, params, result, sensors, out.path());
  REQUIRE(v.rows.size() == 2);
  CHECK_FALSE(v.rows[0].unloaded);
  CHECK(v.rows[1].unloaded);
  CHECK(v.rows[1].proposed_count_vph == 0.0);
  CHECK(v.rows[1].baseline_count_vph == 0.0);
  CHECK(std::filesystem::exists(out / "counts_validation.csv"));
  CHECK_THROWS_AS(export_counts_validation(snap, params, result, {}, out.path()), Error);
}

TEST_CASE("sensors do not influence the estimate") {
  TempDir dir, with, without;
  write_scenario(synthesize(small_spec(13, 0.05)), dir.path());
  run_batch(discover_bundles(dir.path()), BatchMode::Estimate, with.path());
  std::filesystem::remove(dir / "sensors.csv");
  run_batch(discover_bundles(dir.path()), BatchMode::Estimate, without.path());
  CHECK(read_file(with / "estimates.csv") == read_file(without / "estimates.csv"));
  CHECK(read_file(with / "all" / "trace.csv") == read_file(without / "all" / "trace.csv"));
}

TEST_CASE("command line exit codes") {
  TempDir dir, out;
  const auto scenario = dir / "scenario";
  CHECK(run_cli("") == 2);
  CHECK(run_cli("estimate --bogus") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("generate --out " + scenario.string() + " --segments 40 --ods 6 --max-path-len 8 --true-x 3 --seed 4") ==
        0);
  CHECK(std::filesystem::exists(scenario / "manifest.txt"));
  CHECK(run_cli("estimate --network-dir " + scenario.string() + " --out " + out.path().string()) == 0);
  CHECK(std::filesystem::exists(out / "estimates.csv"));
  CHECK(run_cli("compare --network-dir " + scenario.string() + " --grid-points 101 --out " + (out / "c").string()) ==
        0);
  CHECK(run_cli("estimate --network-dir " + (dir / "missing").string()) == 2);
  CHECK(run_cli("generate --out " + (dir / "bad").string() + " --segments 10 --min-path-len 50 --max-path-len 60") ==
        2);
  write_file(scenario / "od.csv", "od_id,path_id,demand_vph\nx,nowhere,1\n");
  CHECK(run_cli("estimate --network-dir " + scenario.string() + " --out " + out.path().string()) == 1);
}
