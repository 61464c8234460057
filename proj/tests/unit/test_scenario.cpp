#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "volu/camera.hpp"
#include "volu/charts.hpp"
#include "volu/errors.hpp"
#include "volu/scenario.hpp"
#include "volu/simulation.hpp"

namespace volu {
namespace {

TEST(Camera, Path2FullRevolutionAndRadius) {
  CameraSpec spec;
  spec.kind = CameraKind::kPath2;
  const CameraPath path(spec);
  const double period = 2.0 * std::numbers::pi / spec.angular_speed;
  const Viewpoint a = path.at(0.0);
  const Viewpoint b = path.at(period);
  EXPECT_NEAR((a.position - b.position).norm(), 0.0, 1e-9);
  for (double t = 0.0; t < period; t += 0.37) {
    EXPECT_NEAR(path.at(t).position.norm(), spec.radius, 1e-12);
  }
  CameraSpec fast = spec;
  fast.angular_speed *= 2.0;
  EXPECT_NEAR((CameraPath(fast).at(period / 2).position - a.position).norm(), 0.0, 1e-9);
}

TEST(Camera, Path1SweepsBetweenFarAndNear) {
  CameraSpec spec;
  spec.kind = CameraKind::kPath1;
  EXPECT_DOUBLE_EQ(path1_distance(spec, 0.0), 5.0);
  EXPECT_DOUBLE_EQ(path1_distance(spec, 10.0), 0.5);
  EXPECT_DOUBLE_EQ(path1_distance(spec, 20.0), 5.0);
  EXPECT_DOUBLE_EQ(path1_distance(spec, 5.0), 2.75);
}

TEST(Camera, StaticFlipMirrorsThePosition) {
  CameraSpec spec;
  spec.flip_times = {10.0};
  const CameraPath path(spec);
  const Vec3 before = path.at(9.9).position;
  const Vec3 after = path.at(10.0).position;
  EXPECT_NEAR((before + after).norm(), 0.0, 1e-12);
  EXPECT_NEAR(before.norm(), 2.0, 1e-12);
}

TEST(Camera, KindNames) {
  for (const char* name : {"static", "path1", "path2", "pan"}) {
    EXPECT_EQ(to_string(parse_camera_kind(name)), name);
  }
  EXPECT_THROW(parse_camera_kind("dolly"), ConfigError);
}

TEST(MultiObjectScene, FiveObjectsOnACircle) {
  const Scenario s = build_multi_object_scene(5);
  ASSERT_EQ(s.objects.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_NEAR(s.objects[i].position.norm(), 3.0, 1e-12);
    for (std::size_t j = i + 1; j < 5; ++j) {
      EXPECT_GE((s.objects[i].position - s.objects[j].position).norm(), 1.0);
    }
  }
  // The panning camera always leaves at least one object outside the view.
  const CameraPath path(s.camera);
  for (double t = 0.0; t < 80.0; t += 0.25) {
    const Viewpoint v = path.at(t);
    int visible = 0;
    for (const auto& o : s.objects) visible += in_frustum(o.position, v) ? 1 : 0;
    EXPECT_LT(visible, 5);
  }
}

TEST(MultiObjectScene, SingleObjectDegenerates) {
  const Scenario s = build_multi_object_scene(1);
  ASSERT_EQ(s.objects.size(), 1u);
  EXPECT_EQ(s.objects[0].ladder, default_ladder_bps());
  EXPECT_THROW(build_multi_object_scene(0), ValidationError);
}

TEST(ScenarioJson, KeysAreApplied) {
  const Scenario s = parse_scenario_json(R"({
    "algorithm": "tba", "tileDepth": 1, "duration": 12, "seed": 9,
    "camera": {"kind": "path2", "radius": 3.5},
    "network": {"schedule": [[0, 5e6], [4, 9e6]], "cycleLength": 8},
    "cbm": {"cycle": 0.25, "tbaSafety": 0.8, "strictBudget": true},
    "window": {"cap": 4, "rampEnd": 3},
    "predictor": {"pErrMin": 0.05, "pErrSlope": 0.2},
    "objects": [{"position": [1, 0, 0], "loop": true, "clipDuration": 10}]
  })");
  EXPECT_EQ(s.cbm.algorithm, Algorithm::kTba);
  EXPECT_EQ(s.tile_depth, 1);
  EXPECT_EQ(s.duration, 12.0);
  EXPECT_EQ(s.seed, 9u);
  EXPECT_EQ(s.network.seed, 9u);
  EXPECT_EQ(s.camera.kind, CameraKind::kPath2);
  EXPECT_EQ(s.camera.radius, 3.5);
  ASSERT_EQ(s.network.schedule.size(), 2u);
  EXPECT_EQ(s.network.schedule[1].rate, 9e6);
  EXPECT_EQ(s.network.cycle_length, 8.0);
  EXPECT_EQ(s.cbm.cycle, 0.25);
  EXPECT_EQ(s.cbm.tba_safety, 0.8);
  EXPECT_EQ(s.cbm.budget_mode, BudgetMode::kStrict);
  EXPECT_EQ(s.window.cap, 4.0);
  EXPECT_EQ(s.predictor.p_err_min, 0.05);
  ASSERT_EQ(s.objects.size(), 1u);
  EXPECT_TRUE(s.objects[0].loop);
  EXPECT_EQ(s.objects[0].clip_duration, 10.0);
}

TEST(ScenarioJson, StringShorthands) {
  const Scenario s = parse_scenario_json(R"({"camera": "path1", "network": "variable"})");
  EXPECT_EQ(s.camera.kind, CameraKind::kPath1);
  EXPECT_EQ(s.network_name, "variable");
  EXPECT_EQ(s.network.rate_at(5.0), 6e6);
}

TEST(ScenarioJson, InvalidValuesAreRejected) {
  EXPECT_THROW(parse_scenario_json(R"({"duration": -1})"), ValidationError);
  EXPECT_THROW(parse_scenario_json(R"({"tileDepth": 11})"), ValidationError);
  EXPECT_THROW(parse_scenario_json(R"({"algorithm": "mpc"})"), ConfigError);
  EXPECT_THROW(parse_scenario_json(R"({"network": "lte"})"), ConfigError);
  EXPECT_THROW(parse_scenario_json("[1, 2]"), ConfigError);
  EXPECT_THROW(parse_scenario_json("{not json"), ConfigError);
}

Scenario short_run(Algorithm a) {
  Scenario s;
  s.duration = 6.0;
  s.tile_depth = 1;
  s.cbm.algorithm = a;
  s.camera.kind = CameraKind::kPath2;
  return s;
}

TEST(Simulation, ReproducibleMetrics) {
  for (Algorithm a : {Algorithm::kWba, Algorithm::kStrippedWba, Algorithm::kTba, Algorithm::kBba}) {
    const Scenario s = short_run(a);
    std::ostringstream first;
    std::ostringstream second;
    write_metrics_csv(first, run(s));
    write_metrics_csv(second, run(s));
    EXPECT_EQ(first.str(), second.str()) << to_string(a);
    EXPECT_GT(first.str().size(), 100u);
  }
}

TEST(Simulation, RequestCycleTimingAndSummary) {
  const Scenario s = short_run(Algorithm::kWba);
  const RunResult r = run(s);
  ASSERT_FALSE(r.metrics.empty());
  for (std::size_t i = 1; i < r.metrics.size(); ++i) {
    EXPECT_GT(r.metrics[i].t, r.metrics[i - 1].t);
  }
  EXPECT_GT(r.summary.startup_delay, 0.0);
  EXPECT_LT(r.summary.startup_delay, 1.0);
  EXPECT_GT(r.summary.total_delivered_utility, 0.0);
  EXPECT_GE(r.summary.avg_played_representation_visible, 1.0);
  const std::string json = summary_json(r);
  for (const char* key : {"avgSelectedBandwidth", "stallCount", "stallSeconds",
                          "avgPlayedRepresentationVisible", "totalDeliveredUtility",
                          "p95ResponseLatency"}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
}

TEST(Charts, EmptyPanelsAreOmitted) {
  const RunResult r = run(short_run(Algorithm::kTba));
  const auto dir = std::filesystem::temp_directory_path() / "volu_chart_test";
  std::filesystem::remove_all(dir);
  write_charts(r, dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "occupancy.svg"));
  EXPECT_TRUE(std::filesystem::exists(dir / "bandwidth.svg"));
  EXPECT_FALSE(std::filesystem::exists(dir / "latency.svg"));
  std::filesystem::remove_all(dir);
}

TEST(Charts, SvgSpansTheRequestedAxis) {
  ChartSpec c;
  c.title = "t";
  c.x_max = 60.0;
  c.series.push_back({"a", {0.0, 30.0, 60.0}, {1.0, 2.0, 3.0}});
  const std::string svg = line_chart_svg(c);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("polyline"), std::string::npos);
  EXPECT_NE(svg.find(">60<"), std::string::npos);
}

}  // namespace
}  // namespace volu
