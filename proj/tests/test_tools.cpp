// Instance generation, rendering, config and report plumbing.

#include <gtest/gtest.h>

#include <sstream>

#include "mstsp/config_io.hpp"
#include "mstsp/generate.hpp"
#include "mstsp/grasp.hpp"
#include "mstsp/instance_io.hpp"
#include "mstsp/render.hpp"
#include "mstsp/report.hpp"

namespace mstsp {
namespace {

LineNetwork small_network() {
  std::istringstream pylons("id,x,y\n1,100,0\n2,300,0\n3,600,0\n# comment\n4,0,450\n5,0,900\n");
  std::istringstream lines("a,b\n1,2\n2,3\n4,5\n");
  return {parse_pylon_csv(pylons), parse_line_csv(lines)};
}

TEST(PylonCsv, ParsesAndRejects) {
  const auto net = small_network();
  ASSERT_EQ(net.pylons.size(), 5u);
  EXPECT_EQ(net.pylons[3].position, (Point{0, 450, 0}));
  std::istringstream with_z("7,1,2,3\n");
  EXPECT_EQ(parse_pylon_csv(with_z)[0].position.z, 3.0);
  std::istringstream bad("1,2\n");
  EXPECT_THROW(parse_pylon_csv(bad), std::invalid_argument);
  std::istringstream junk("1,a,b\n");
  EXPECT_THROW(parse_pylon_csv(junk), std::invalid_argument);
  EXPECT_EQ(chain_lines(net.pylons).size(), 4u);
}

TEST(Selection, OneEndpointRule) {
  const auto net = small_network();
  const auto inst = select_instance(net, {0, 0, 0}, {350.0, false}, {}, 2000.0);
  // 1-2 fully inside, 2-3 has pylon 2 inside, 4-5 starts at 450 m.
  ASSERT_EQ(inst.segment_count(), 2u);
  EXPECT_EQ(inst.segments[0].a, 1);
  EXPECT_EQ(inst.segments[1].b, 3);
  EXPECT_EQ(inst.segments[1].id, 2);
  EXPECT_EQ(inst.pylons.size(), 3u);
  EXPECT_EQ(*inst.d_max, 350.0);
}

TEST(Selection, BothEndpointsRule) {
  const auto inst = select_instance(small_network(), {0, 0, 0}, {350.0, true}, {}, 2000.0);
  EXPECT_EQ(inst.segment_count(), 1u);
}

TEST(Selection, LargerRadiusNeverLosesSegments) {
  const auto net = synthetic_network({Topology::Grid, 60, 150.0, {}, std::nullopt, 3});
  std::size_t prev = 0;
  for (double d = 100.0; d <= 2000.0; d += 50.0) {
    std::size_t n = 0;
    try {
      n = select_instance(net, {0, 0, 0}, {d, false}, {}, 1e5).segment_count();
    } catch (const std::invalid_argument&) {
      n = 0;
    }
    EXPECT_GE(n, prev) << d;
    prev = n;
  }
  EXPECT_EQ(prev, 60u);
}

TEST(Selection, EmptySelectionNamesTheRadius) {
  try {
    select_instance(small_network(), {5000, 5000, 0}, {10.0, false}, {}, 100.0);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("d_max"), std::string::npos);
  }
}

TEST(Synthetic, SeededGenerationIsReproducible) {
  for (Topology t : {Topology::Star, Topology::Line, Topology::Grid}) {
    SyntheticSpec spec{t, 14, 150.0, {}, std::nullopt, 9};
    const std::string a = instance_to_json(synthetic_instance(spec)).dump();
    EXPECT_EQ(a, instance_to_json(synthetic_instance(spec)).dump());
    spec.seed = 10;
    EXPECT_NE(a, instance_to_json(synthetic_instance(spec)).dump());
  }
}

TEST(Synthetic, InstancesAreCoverable) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    for (Topology t : {Topology::Star, Topology::Line, Topology::Grid}) {
      const Instance inst = synthetic_instance({t, 3 + seed % 10, 150.0, {}, std::nullopt, seed});
      EXPECT_EQ(inst.segment_count(), 3 + seed % 10);
      EXPECT_NO_THROW(validate_coverable(inst, build_cost_matrix(inst)));
    }
  }
}

// gen -> solve -> verify in-process on many small random instances.
TEST(Pipeline, HundredSyntheticInstances) {
  GraspConfig cfg;
  cfg.trials = 3;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto topo = static_cast<Topology>(seed % 3);
    const Instance gen = synthetic_instance({topo, 2 + seed % 11, 120.0 + seed, {}, std::nullopt, seed});
    const Instance inst = instance_from_json(nlohmann::json::parse(instance_to_json(gen).dump()));
    const CostMatrix m = build_cost_matrix(inst);
    cfg.seed = seed;
    const auto r = solve(inst, m, cfg);
    ASSERT_TRUE(r.feasible) << seed;
    const Evaluator eval(m, inst.c_max);
    const Solution back = solution_from_json(nlohmann::json::parse(solution_to_json(r.best, true).dump()), eval);
    EXPECT_TRUE(check_feasible(back, m, inst.c_max).feasible()) << seed;
  }
}

class RenderFixture : public ::testing::Test {
 protected:
  Instance inst = synthetic_instance({Topology::Star, 5, 150.0, {}, 5000.0, 2});
  CostMatrix m = build_cost_matrix(inst);
  Evaluator eval{m, inst.c_max};
  Solution two = eval.make_solution({{{1, Direction::AB}, {2, Direction::BA}, {3, Direction::AB}},
                                     {{4, Direction::AB}, {5, Direction::AB}}});
};

TEST_F(RenderFixture, GeoJsonHasOneRoutePerTour) {
  const auto g = render_geojson(inst, two);
  EXPECT_EQ(g["type"], "FeatureCollection");
  std::size_t routes = 0, segments = 0;
  for (const auto& f : g["features"]) {
    EXPECT_EQ(f["type"], "Feature");
    EXPECT_EQ(f["geometry"]["type"], "LineString");
    EXPECT_GE(f["geometry"]["coordinates"].size(), 2u);
    for (const auto& c : f["geometry"]["coordinates"]) EXPECT_EQ(c.size(), 2u);
    (f["properties"]["kind"] == "route" ? routes : segments)++;
  }
  EXPECT_EQ(routes, 2u);
  EXPECT_EQ(segments, 5u);
  // Route 0: depot, then entry/exit of three visits, then depot.
  EXPECT_EQ(g["features"][5]["geometry"]["coordinates"].size(), 8u);
}

TEST_F(RenderFixture, EmptyToursAreNotDrawn) {
  Solution padded = two;
  padded.tours.insert(padded.tours.begin() + 1, Tour{});
  const auto g = render_geojson(inst, padded);
  EXPECT_EQ(g["features"].size(), 7u);
  const std::string svg = render_svg(inst, padded);
  std::size_t polylines = 0;
  for (auto p = svg.find("<polyline"); p != std::string::npos; p = svg.find("<polyline", p + 1)) ++polylines;
  EXPECT_EQ(polylines, 2u);
}

TEST_F(RenderFixture, SvgColorsFollowTourIndex) {
  const std::string svg = render_svg(inst, two);
  EXPECT_NE(svg.find(std::string("stroke=\"") + tour_color(0)), std::string::npos);
  EXPECT_NE(svg.find(std::string("stroke=\"") + tour_color(1)), std::string::npos);
  EXPECT_EQ(svg, render_svg(inst, two));
  std::size_t lines = 0;
  for (auto p = svg.find("class=\"segment\""); p != std::string::npos; p = svg.find("class=\"segment\"", p + 1)) ++lines;
  EXPECT_EQ(lines, 5u);
}

TEST_F(RenderFixture, MismatchedSolutionIsRejected) {
  const Solution partial = eval.make_solution({{{1, Direction::AB}}});
  EXPECT_THROW(render_svg(inst, partial), std::invalid_argument);
  EXPECT_THROW(render_geojson(inst, partial), std::invalid_argument);
}

TEST(ConfigJson, OverlayAndValidation) {
  GraspConfig cfg;
  apply_config_json(cfg, {{"rcl", 0.5}, {"tabu", 3}, {"seed", 77}});
  EXPECT_EQ(cfg.rcl_fraction, 0.5);
  EXPECT_EQ(cfg.effective_tabu_size(100), 3u);
  EXPECT_EQ(cfg.seed, 77u);
  EXPECT_EQ(cfg.trials, 30u);
  EXPECT_THROW(apply_config_json(cfg, {{"rlc", 0.5}}), std::invalid_argument);
  EXPECT_THROW(apply_config_json(cfg, {{"rcl", "wide"}}), std::invalid_argument);
  EXPECT_THROW(apply_config_json(cfg, {{"trials", 0}}), std::invalid_argument);
  EXPECT_EQ(config_to_json(GraspConfig{}, 12)["tabu"], 3);
}

TEST(BenchCsv, ColumnsAndDeviation) {
  const Instance inst = synthetic_instance({Topology::Line, 4, 150.0, {}, std::nullopt, 1});
  const CostMatrix m = build_cost_matrix(inst);
  GraspConfig cfg;
  cfg.trials = 4;
  const auto r = solve(inst, m, cfg);
  const auto row = make_bench_row("line4", inst, r, r.best.total_cost);
  EXPECT_NEAR(*row.pdb, 0.0, 1e-12);
  EXPECT_GE(*row.pdm, *row.pdb);
  EXPECT_GE(row.total_seconds, 0.0);
  std::ostringstream os;
  write_bench_csv(os, row);
  const std::string line = os.str();
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
  EXPECT_EQ(std::string(bench_csv_header()).find("instance,n_s,c_max,n_t,best_cost,mean_cost,pdb,pdm"), 0u);
  EXPECT_EQ(line.rfind("line4,4,", 0), 0u);
}

}  // namespace
}  // namespace mstsp
