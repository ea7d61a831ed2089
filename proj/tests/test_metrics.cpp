#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "odscale/batch.hpp"
#include "odscale/error.hpp"
#include "odscale/metrics.hpp"
#include "support/reference_tables.hpp"

using namespace odscale;
using namespace odscale::metrics;

namespace {

PairedObservations pairs(const std::vector<double>& gt, const std::vector<double>& est) {
  PairedObservations obs{ObservationKind::TravelTimes, {}};
  for (std::size_t i = 0; i < gt.size(); ++i) obs.entries.push_back({"e" + std::to_string(i), gt[i], est[i]});
  return obs;
}

// Spreadsheet-style recomputation: mean of ground truth, RMSE, ratio.
long double spreadsheet_nrmse(const std::vector<double>& gt, const std::vector<double>& est) {
  long double sum_gt = 0, sum_sq = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    sum_gt += gt[i];
    sum_sq += (static_cast<long double>(est[i]) - gt[i]) * (static_cast<long double>(est[i]) - gt[i]);
  }
  const long double n = gt.size();
  return std::sqrt(sum_sq / n) / (sum_gt / n) * 100;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an odscale::Error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("nrmse hand examples") {
  CHECK(nrmse(pairs({10, 20, 30}, {10, 20, 30})) == 0.0);
  CHECK(nrmse(pairs({100}, {50})) == doctest::Approx(50.0));
  CHECK(code_of([] { nrmse(pairs({}, {})); }) == ErrorCode::EmptyCollection);
  CHECK(code_of([] { nrmse(pairs({0, 0}, {1, 2})); }) == ErrorCode::ZeroGroundTruthSum);
}

TEST_CASE("property: nrmse matches a spreadsheet recomputation and is scale invariant") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> value(0.0, 500.0);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> gt(10), est(10);
    for (int i = 0; i < 10; ++i) {
      gt[i] = value(rng);
      est[i] = value(rng);
    }
    const double n = nrmse(pairs(gt, est));
    CHECK(n >= 0.0);
    CHECK(n == doctest::Approx(static_cast<double>(spreadsheet_nrmse(gt, est))).epsilon(1e-12));
    const double s = scale(rng);
    for (int i = 0; i < 10; ++i) {
      gt[i] *= s;
      est[i] *= s;
    }
    CHECK(nrmse(pairs(gt, est)) == doctest::Approx(n).epsilon(1e-12));
  }
}

TEST_CASE("percentages") {
  CHECK(pct_improvement(108, 39) == doctest::Approx(63.888888));
  CHECK(round_report(pct_improvement(108, 39)) == 64);
  CHECK(round_report(pct_improvement(110, 29)) == 74);
  CHECK(pct_improvement(50, 50) == 0.0);
  CHECK(round_report(pct_gap(45, 44)) == 2);
  CHECK(pct_gap(58, 50) == 16.0);
  CHECK(pct_gap(54, 54) == 0.0);
  CHECK(pct_gap(41, 40) == 2.5);
  CHECK(code_of([] { pct_improvement(0, 1); }) == ErrorCode::ZeroBaseline);
  CHECK(code_of([] { pct_gap(1, 0); }) == ErrorCode::ZeroBenchmark);
}

TEST_CASE("rounding is half away from zero") {
  CHECK(round_report(2.5) == 3);
  CHECK(round_report(-2.5) == -3);
  CHECK(round_report(2.4999) == 2);
  CHECK(round_report(0.5) == 1);
}

TEST_CASE("every printed gap follows from its triple") {
  for (const auto& row : testgen::kGapTable) {
    CHECK(round_report(pct_gap(row.proposed, row.benchmark)) == row.printed_gap);
  }
}

TEST_CASE("median, mean and empirical cdf") {
  const std::vector<double> odd = {5, 1, 3};
  const std::vector<double> even = {4, 1, 3, 2};
  CHECK(median(odd) == 3.0);
  CHECK(median(even) == 2.5);
  CHECK(mean(even) == 2.5);
  const std::vector<double> v = {3, 1, 3, 2};
  const auto cdf = empirical_cdf(v);
  REQUIRE(cdf.size() == 3);
  CHECK(cdf[0] == std::pair<double, double>{1.0, 0.25});
  CHECK(cdf[1] == std::pair<double, double>{2.0, 0.5});
  CHECK(cdf[2] == std::pair<double, double>{3.0, 1.0});
  CHECK(code_of([] { median(std::span<const double>{}); }) == ErrorCode::EmptyCollection);
}

TEST_CASE("report percentages use rounded nRMSE") {
  CHECK(*reported_pct_gap(45.4, 43.6) == doctest::Approx(pct_gap(45, 44)));
  CHECK(*reported_pct_gap(0.2, 0.3) == 0.0);
  CHECK_FALSE(reported_pct_gap(0.6, 0.3).has_value());
  CHECK(*reported_pct_improvement(8.2, 0.1) == 100.0);
  CHECK(*reported_pct_improvement(0.1, 0.2) == 0.0);
}
