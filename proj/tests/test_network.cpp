#include <doctest.h>

#include <random>

#include "odscale/error.hpp"
#include "odscale/network.hpp"
#include "support/random_instance.hpp"

using namespace odscale;

namespace {

std::vector<Segment> two_segments() {
  return {{"a", 1.0, 2, 100.0, 10.0}, {"b", 2.0, 3, 120.0, 20.0}};
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

TEST_CASE("snapshot keeps input order and resolves ids") {
  const auto snap = build_snapshot(two_segments(), {{"p", {"b", "a"}}}, {{"od", "p", 50.0}});
  CHECK(snap.segments().size() == 2);
  CHECK(snap.segment_index("b") == 1u);
  CHECK_FALSE(snap.segment_index("z").has_value());
  CHECK(snap.path_segments(0).size() == 2);
  CHECK(snap.path_segments(0)[0] == 1u);
  CHECK(snap.od_path(0) == 0u);
  CHECK(snap.assignment().nonzero_count() == 2);
  CHECK(snap.assignment().at(0, 0) == 1.0);
  CHECK(snap.segment("a").lanes == 2);
}

TEST_CASE("demand coefficients sum OD demand over shared segments") {
  const auto snap = build_snapshot(two_segments(), {{"p1", {"a", "b"}}, {"p2", {"b"}}},
                                   {{"o1", "p1", 100.0}, {"o2", "p2", 50.0}, {"o3", "p2", 25.0}});
  const auto c = segment_demand_coefficients(snap);
  CHECK(c[0] == 100.0);
  CHECK(c[1] == 175.0);
}

TEST_CASE("segment without demand has zero coefficient") {
  const auto snap = build_snapshot(two_segments(), {{"p", {"a"}}}, {{"od", "p", 10.0}});
  CHECK(segment_demand_coefficients(snap)[1] == 0.0);
}

TEST_CASE("assignment override replaces path-derived entries") {
  const auto snap = build_snapshot(two_segments(), {{"p", {"a", "b"}}}, {{"od", "p", 100.0}},
                                   std::vector<AssignmentEntry>{{"a", "od", 0.25}});
  const auto c = segment_demand_coefficients(snap);
  CHECK(c[0] == doctest::Approx(25.0));
  CHECK(c[1] == 0.0);
}

TEST_CASE("invalid inputs are rejected with the matching code") {
  auto segs = two_segments();
  CHECK(code_of([&] { build_snapshot(segs, {{"p", {"a", "zz"}}}, {{"od", "p", 1.0}}); }) ==
        ErrorCode::MissingReference);
  CHECK(code_of([&] { build_snapshot(segs, {{"p", {"a"}}}, {{"od", "q", 1.0}}); }) == ErrorCode::MissingReference);
  CHECK(code_of([&] { build_snapshot(segs, {{"p", {"a"}}, {"p", {"b"}}}, {{"od", "p", 1.0}}); }) ==
        ErrorCode::DuplicateId);
  CHECK(code_of([&] { build_snapshot(segs, {{"p", {"a", "a"}}}, {{"od", "p", 1.0}}); }) == ErrorCode::DuplicateId);
  CHECK(code_of([&] { build_snapshot(segs, {{"p", {"a"}}}, {{"od", "p", -1.0}}); }) == ErrorCode::NegativeDemand);
  CHECK(code_of([&] {
          build_snapshot(segs, {{"p", {"a"}}}, {{"od", "p", 1.0}}, std::vector<AssignmentEntry>{{"a", "od", 1.5}});
        }) == ErrorCode::InvalidProbability);

  auto bad = segs;
  bad[0].length_km = 0.0;
  CHECK(code_of([&] { build_snapshot(bad, {{"p", {"a"}}}, {{"od", "p", 1.0}}); }) == ErrorCode::InvalidSegment);
  bad = segs;
  bad[0].v_min_kmh = bad[0].v_max_kmh;
  CHECK(code_of([&] { build_snapshot(bad, {{"p", {"a"}}}, {{"od", "p", 1.0}}); }) == ErrorCode::InvalidSegment);
  bad = segs;
  bad[1].lanes = 0;
  CHECK(code_of([&] { build_snapshot(bad, {{"p", {"a"}}}, {{"od", "p", 1.0}}); }) == ErrorCode::InvalidSegment);
}

TEST_CASE("property: demand coefficients equal the dense product A d") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = testgen::random_instance(rng);
    const auto c = segment_demand_coefficients(in.snapshot());
    const auto ref = oracle::segment_demand(in.reference(), 1.0L);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(c[i] == doctest::Approx(static_cast<double>(ref[i])).epsilon(1e-13));
  }
}

TEST_CASE("empty OD set gives zero coefficients") {
  const auto snap = build_snapshot(two_segments(), {{"p", {"a", "b"}}}, {});
  for (double c : segment_demand_coefficients(snap)) CHECK(c == 0.0);
}

TEST_CASE("property: binary entries, nonzero count and linearity in demand") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    auto in = testgen::random_instance(rng);
    const auto snap = in.snapshot();
    std::size_t expected = 0;
    for (std::size_t j = 0; j < snap.od_pairs().size(); ++j) {
      expected += snap.path_segments(snap.od_path(j)).size();
      for (const auto& e : snap.assignment().column(j)) CHECK(e.probability == 1.0);
    }
    CHECK(snap.assignment().nonzero_count() == expected);

    const auto c = segment_demand_coefficients(snap);
    const double s = testgen::uniform(rng, 0.1, 10.0);
    for (auto& od : in.od_pairs) od.subsample_demand_vph *= s;
    const auto scaled = segment_demand_coefficients(in.snapshot());
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(c[i] >= 0.0);
      CHECK(scaled[i] == doctest::Approx(s * c[i]).epsilon(1e-13));
    }
  }
}
