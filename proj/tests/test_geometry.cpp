#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mstsp/geometry.hpp"
#include "mstsp/instance_io.hpp"
#include "support.hpp"

namespace mstsp {
namespace {

using testing::integrated_travel_time;

TEST(TravelTime, CruiseBranch) {
  // 2 s up to 5 m/s over 5 m, 2 s back down: exactly on the boundary.
  EXPECT_DOUBLE_EQ(travel_time(10.0, 5.0, 2.5), 4.0);
}

TEST(TravelTime, TriangularBranch) {
  EXPECT_NEAR(travel_time(5.0, 5.0, 2.5), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(travel_time(1.0, 5.0, 2.5), 2.0 * std::sqrt(0.4), 1e-12);
}

TEST(TravelTime, InspectionSpeed) { EXPECT_NEAR(travel_time(100.0, 1.0, 2.5), 100.4, 1e-12); }

TEST(TravelTime, ZeroDistanceIsFree) { EXPECT_EQ(travel_time(0.0, 5.0, 2.5), 0.0); }

TEST(TravelTime, ContinuousAtBranchBoundary) {
  const double v = 5.0, a = 2.5, d = v * v / a;
  EXPECT_NEAR(travel_time(d, v, a), 2.0 * std::sqrt(d / a), 1e-12);
  EXPECT_NEAR(travel_time(std::nextafter(d, 0.0), v, a), travel_time(d, v, a), 1e-9);
}

TEST(TravelTime, RejectsBadArguments) {
  EXPECT_THROW(travel_time(-1.0, 5.0, 2.5), std::invalid_argument);
  EXPECT_THROW(travel_time(1.0, 0.0, 2.5), std::invalid_argument);
  EXPECT_THROW(travel_time(1.0, 5.0, -1.0), std::invalid_argument);
  EXPECT_THROW(travel_time(NAN, 5.0, 2.5), std::invalid_argument);
}

TEST(TravelTime, MatchesNumericalIntegration) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> v(0.5, 15.0), a(0.5, 6.0), f(0.01, 4.0);
  for (int k = 0; k < 300; ++k) {
    const double vv = v(rng), aa = a(rng);
    const double d = f(rng) * vv * vv / aa;  // both branches
    const double want = integrated_travel_time(d, vv, aa);
    EXPECT_NEAR(travel_time(d, vv, aa), want, 1e-9 * want) << d << ' ' << vv << ' ' << aa;
  }
}

TEST(TravelTime, MonotoneInDistance) {
  double prev = 0.0;
  for (double d = 0.0; d < 40.0; d += 0.05) {
    const double t = travel_time(d, 5.0, 2.5);
    EXPECT_GE(t, prev);
    prev = t;
  }
}

TEST(Vertices, RoundTrip) {
  const std::size_t ns = 7;
  EXPECT_EQ(vertex_count(ns), 16u);
  for (int id = 1; id <= 7; ++id) {
    for (Direction d : {Direction::AB, Direction::BA}) {
      const auto v = vertex_of(id, d, ns);
      EXPECT_EQ(v, 2u * id + (d == Direction::BA));
      EXPECT_EQ(segment_of(v), std::make_pair(id, d));
    }
  }
  EXPECT_THROW(vertex_of(0, Direction::AB, ns), std::invalid_argument);
  EXPECT_THROW(vertex_of(8, Direction::AB, ns), std::invalid_argument);
  EXPECT_THROW(segment_of(1), std::invalid_argument);
}

Instance two_segments() {
  Instance inst;
  inst.pylons = {{1, {10, 0, 0}}, {2, {110, 0, 0}}, {3, {0, 20, 0}}, {4, {0, 70, 0}}};
  inst.segments = {{1, 1, 2}, {2, 3, 4}};
  inst.c_max = 1000.0;
  return inst;
}

TEST(CostMatrix, ArcCostsFromKinematics) {
  const Instance inst = two_segments();
  const CostMatrix m = build_cost_matrix(inst);
  ASSERT_EQ(m.size(), 6u);
  // depot -> segment 1 AB: 10 m transfer, then 100 m at inspection speed.
  EXPECT_NEAR(m(0, 2), travel_time(10, 5, 2.5) + 100.4, 1e-12);
  // depot -> segment 1 BA: 110 m transfer.
  EXPECT_NEAR(m(0, 3), 110.0 / 5 + 2 + 100.4, 1e-12);
  // 1 AB ends at (110,0); 2 AB starts at (0,20).
  EXPECT_NEAR(m(2, 4), std::hypot(110, 20) / 5 + 2 + 50.4, 1e-12);
  // into the end depot: transfer only.
  EXPECT_NEAR(m(5, 1), 20.0 / 5 + 2, 1e-12);
  EXPECT_EQ(m(0, 1), 0.0);
}

TEST(CostMatrix, UnusableArcsAreInfinite) {
  const CostMatrix m = build_cost_matrix(two_segments());
  for (std::size_t i = 0; i < m.size(); ++i) {
    EXPECT_FALSE(m.usable(i, 0));
    EXPECT_FALSE(m.usable(1, i));
    EXPECT_FALSE(m.usable(i, i));
  }
  EXPECT_TRUE(std::isinf(m(2, 3)));
  EXPECT_TRUE(std::isinf(m(5, 4)));
  EXPECT_TRUE(m.usable(0, 1));
  EXPECT_TRUE(m.usable(2, 5));
}

TEST(CostMatrix, SeparateEndDepot) {
  Instance inst = two_segments();
  inst.depot_end = {30, 40, 0};
  const CostMatrix m = build_cost_matrix(inst);
  EXPECT_NEAR(m(0, 1), travel_time(50, 5, 2.5), 1e-12);
}

TEST(Instance, StructuralValidation) {
  Instance inst = two_segments();
  inst.segments[1].id = 3;
  EXPECT_THROW(build_cost_matrix(inst), std::invalid_argument);
  inst = two_segments();
  inst.segments[0].b = 99;
  EXPECT_THROW(build_cost_matrix(inst), std::invalid_argument);
  inst = two_segments();
  inst.limits.v_insp = 6.0;
  EXPECT_THROW(build_cost_matrix(inst), std::invalid_argument);
  inst = two_segments();
  inst.c_max = 0.0;
  EXPECT_THROW(build_cost_matrix(inst), std::invalid_argument);
}

TEST(Instance, CoverabilityNamesTheSegment) {
  Instance inst = two_segments();
  inst.c_max = 128.0;  // segment 1 alone needs 4 + 100.4 + 24 s
  const CostMatrix m = build_cost_matrix(inst);
  try {
    validate_coverable(inst, m);
    FAIL() << "expected InfeasibleInstance";
  } catch (const InfeasibleInstance& e) {
    EXPECT_NE(std::string(e.what()).find("segment 1"), std::string::npos);
  }
  inst.c_max = 128.5;
  EXPECT_NO_THROW(validate_coverable(inst, m));
}

TEST(InstanceJson, RoundTrip) {
  Instance inst = two_segments();
  inst.d_max = 500.0;
  inst.depot_end = {1, 2, 3};
  const Instance back = instance_from_json(instance_to_json(inst));
  EXPECT_EQ(instance_to_json(back), instance_to_json(inst));
  ASSERT_TRUE(back.d_max);
  EXPECT_EQ(*back.d_max, 500.0);
  EXPECT_EQ(back.depot_end, (Point{1, 2, 3}));
}

TEST(InstanceJson, SortsSegmentsAndRejectsGarbage) {
  auto j = instance_to_json(two_segments());
  std::swap(j["segments"][0], j["segments"][1]);
  EXPECT_EQ(instance_from_json(j).segments.front().id, 1);
  j.erase("limits");
  EXPECT_THROW(instance_from_json(j), std::invalid_argument);
}

}  // namespace
}  // namespace mstsp
