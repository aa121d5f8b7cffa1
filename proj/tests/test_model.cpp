#include <gtest/gtest.h>

#include <random>

#include "mstsp/model.hpp"
#include "support.hpp"

namespace mstsp {
namespace {

using testing::plain_tour_cost;
using testing::random_instance;

TEST(Penalty, UnderBudgetIsIdentity) {
  EXPECT_EQ(constrained_cost(100.0, 100.0), 100.0);
  EXPECT_EQ(constrained_cost(0.0, 100.0), 0.0);
  EXPECT_EQ(constrained_cost(99.999, 100.0), 99.999);
}

TEST(Penalty, OverBudgetScalesOvershoot) {
  EXPECT_DOUBLE_EQ(constrained_cost(101.0, 100.0), 1101.0);
  EXPECT_DOUBLE_EQ(constrained_cost(150.0, 100.0, {10.0}), 650.0);
}

TEST(Penalty, SweepAcrossBoundary) {
  const double c_max = 3000.0, k = 1000.0;
  for (int i = -500; i < 500; ++i) {
    const double c = c_max + i * 0.013;
    const double got = constrained_cost(c, c_max, {k});
    if (c <= c_max) {
      EXPECT_EQ(got, c);
    } else {
      EXPECT_NEAR(got, c + k * (c - c_max), 1e-9 * got);
      EXPECT_GT(got, c);
    }
  }
}

class ModelFixture : public ::testing::Test {
 protected:
  Instance inst = [] {
    Instance i = random_instance(11, 4);
    i.c_max = 1500.0;
    return i;
  }();
  CostMatrix m = build_cost_matrix(inst);
  Evaluator eval{m, inst.c_max};
};

TEST_F(ModelFixture, TourCostSumsArcs) {
  const std::vector<Visit> t{{3, Direction::BA}, {1, Direction::AB}};
  EXPECT_DOUBLE_EQ(tour_cost(t, m), m(0, 7) + m(7, 2) + m(2, 1));
  EXPECT_DOUBLE_EQ(tour_cost({}, m), m(0, 1));
}

TEST_F(ModelFixture, RandomToursAgreeWithPlainSum) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    std::vector<Visit> t;
    for (int id = 1; id <= 4; ++id) {
      if (rng() & 1) t.push_back({id, (rng() & 1) ? Direction::BA : Direction::AB});
    }
    std::shuffle(t.begin(), t.end(), rng);
    EXPECT_NEAR(tour_cost(t, m), plain_tour_cost(t, m), 1e-9);
  }
}

TEST_F(ModelFixture, MakeSolutionFillsCaches) {
  Solution s = eval.make_solution({{{1, Direction::AB}, {2, Direction::BA}}, {{3, Direction::AB}, {4, Direction::AB}}});
  ASSERT_EQ(s.tours.size(), 2u);
  double total = 0.0;
  for (const auto& t : s.tours) {
    EXPECT_DOUBLE_EQ(t.cost, plain_tour_cost(t.visits, m));
    EXPECT_DOUBLE_EQ(t.penalized, constrained_cost(t.cost, inst.c_max));
    total += t.cost;
  }
  EXPECT_DOUBLE_EQ(s.total_cost, total);
  EXPECT_EQ(s.visit_count(), 4u);
}

TEST_F(ModelFixture, FeasibleSolutionHasNoViolations) {
  Solution s = eval.make_solution({{{1, Direction::AB}, {2, Direction::BA}}, {{3, Direction::AB}}, {{4, Direction::BA}}});
  for (const auto& t : s.tours) ASSERT_LE(t.cost, inst.c_max);
  EXPECT_TRUE(check_feasible(s, m, inst.c_max).feasible());
  EXPECT_TRUE(covers_all(s, 4));
}

TEST_F(ModelFixture, MissingSegment) {
  Solution s = eval.make_solution({{{1, Direction::AB}, {2, Direction::BA}}, {{3, Direction::AB}}});
  const auto r = check_feasible(s, m, inst.c_max);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::Missing);
  EXPECT_EQ(r.violations[0].segment, 4);
  EXPECT_FALSE(covers_all(s, 4));
}

TEST_F(ModelFixture, DuplicatedSegment) {
  Solution s = eval.make_solution(
      {{{1, Direction::AB}, {2, Direction::BA}}, {{3, Direction::AB}, {4, Direction::AB}}, {{2, Direction::AB}}});
  const auto r = check_feasible(s, m, inst.c_max);
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].kind, Violation::Kind::Duplicated);
  EXPECT_EQ(r.violations[0].segment, 2);
}

TEST_F(ModelFixture, OverBudgetTour) {
  Solution s = eval.make_solution({{{1, Direction::AB}, {2, Direction::BA}, {3, Direction::AB}, {4, Direction::AB}}});
  const double c = plain_tour_cost(s.tours[0].visits, m);
  const double tight = c - 10.0;
  const auto r = check_feasible(s, m, tight);
  ASSERT_EQ(r.count(Violation::Kind::OverBudget), 1u);
  EXPECT_NEAR(r.violations[0].overshoot, 10.0, 1e-9);
  EXPECT_TRUE(check_feasible(s, m, c).feasible());
}

TEST_F(ModelFixture, InvalidSegmentId) {
  Solution s;
  s.tours.push_back({{{5, Direction::AB}}, 0, 0});
  const auto r = check_feasible(s, m, inst.c_max);
  EXPECT_EQ(r.count(Violation::Kind::InvalidSegment), 1u);
  EXPECT_EQ(r.count(Violation::Kind::Missing), 4u);
}

TEST_F(ModelFixture, HashIgnoresTourOrderAndEmptyTours) {
  const std::vector<Visit> a{{1, Direction::AB}, {2, Direction::BA}}, b{{3, Direction::AB}, {4, Direction::BA}};
  const Solution s1 = eval.make_solution({a, b});
  const Solution s2 = eval.make_solution({b, {}, a});
  EXPECT_EQ(solution_hash(s1), solution_hash(s2));
  EXPECT_EQ(canonical_form(s1), canonical_form(s2));

  const Solution flipped = eval.make_solution({{{2, Direction::BA}, {1, Direction::AB}}, b});
  EXPECT_NE(solution_hash(s1), solution_hash(flipped));
  const Solution redirected = eval.make_solution({{{1, Direction::BA}, {2, Direction::BA}}, b});
  EXPECT_NE(solution_hash(s1), solution_hash(redirected));
}

TEST_F(ModelFixture, PruneDropsEmptyTours) {
  const Solution s = prune_empty_tours(eval.make_solution({{}, {{1, Direction::AB}}, {}}), eval);
  EXPECT_EQ(s.tours.size(), 1u);
  EXPECT_EQ(s.nonempty_tours(), 1u);
}

TEST_F(ModelFixture, JsonRoundTrip) {
  const Solution s = eval.make_solution({{{2, Direction::BA}, {1, Direction::AB}}, {{3, Direction::AB}, {4, Direction::BA}}});
  const auto j = solution_to_json(s, true);
  EXPECT_EQ(j["tours"][0][0]["dir"], "BA");
  EXPECT_EQ(j["per_tour_costs"].size(), 2u);
  const Solution back = solution_from_json(j, eval);
  EXPECT_EQ(canonical_form(back), canonical_form(s));
  EXPECT_DOUBLE_EQ(back.total_cost, s.total_cost);
}

TEST_F(ModelFixture, JsonRejectsUnknownSegment) {
  auto j = solution_to_json(eval.make_solution({{{1, Direction::AB}}}), false);
  j["tours"][0][0]["seg"] = 9;
  EXPECT_THROW(solution_from_json(j, eval), std::invalid_argument);
  j["tours"][0][0]["seg"] = 1;
  j["tours"][0][0]["dir"] = "XY";
  EXPECT_THROW(solution_from_json(j, eval), std::invalid_argument);
}

TEST(Metrics, PercentDeviation) {
  // Benchmark rows at d_max = 500 m, c_max = 1000 s, rounded to 0.1.
  EXPECT_NEAR(pdb(3499.8, 3178.6), 10.1, 0.05);
  EXPECT_NEAR(pdm(3506.5, 3178.6), 10.3, 0.05);
  EXPECT_NEAR(pdb(3221.4, 3178.6), 1.3, 0.05);
  EXPECT_EQ(pdb(10.0, 10.0), 0.0);
  EXPECT_THROW(pdb(1.0, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace mstsp
