// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// With --criterion N only that criterion runs. The exit status is nonzero
// when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "optimizer_fixtures.hpp"
#include "volu/media_model.hpp"
#include "volu/rate_utility_optimizer.hpp"
#include "volu/scenario.hpp"
#include "volu/simulation.hpp"
#include "volu/utility_model.hpp"
#include "volu/view_geometry.hpp"
#include "volu/window_buffer.hpp"

namespace {

using namespace volu;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Scenario scenario(const std::string& json) { return parse_scenario_json(json); }

// 1. Window size ramp and edge span.
Outcome window_math() {
  const auto start = Clock::now();
  Outcome o;
  const std::vector<std::pair<double, double>> points{{0, 1}, {2, 3}, {4, 5}, {10, 5}};
  for (const auto& [t, want] : points) {
    if (window_size(t) != want) {
      o.pass = false;
      o.detail += fmt("dW(%g)=%.17g ", t, window_size(t));
    }
  }
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> speed(0.25, 4.0);
  std::uniform_real_distribution<double> step(0.0, 0.5);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    ObjectTimeline tl;
    tl.tau0 = 3.0 * step(rng);
    tl.speed = speed(rng);
    tl.clip_end = 1e9;
    WindowState w({tl});
    w.start(1.0);
    double t = 1.0;
    for (int i = 0; i < 200; ++i) {
      t += step(rng);
      const WindowEdges e = w.edges(t, 0);
      worst = std::max(worst, std::abs((e.lead - e.trail) - tl.speed * window_size(t - 1.0)));
    }
  }
  const double secs = seconds_since(start);
  if (worst > 1e-12) o.pass = false;
  if (secs >= 1.0) o.pass = false;
  o.detail += fmt("max |span - v*dW| = %.3g, %.3f s", worst, secs);
  return o;
}

std::size_t closed_form_bytes(const SegmentIndex& index) {
  std::size_t bytes = 12;
  for (const auto& g : index.gofs) {
    const std::size_t t = g.tiles.size();
    bytes += 16 + 8 * t + index.representation_count * (8 + 4 * t);
  }
  return bytes;
}

SegmentIndex random_index(std::mt19937& rng) {
  std::uniform_int_distribution<int> reps(1, 8);
  std::uniform_int_distribution<int> gofs(0, 10);
  std::uniform_int_distribution<int> tiles(0, 64);
  std::uniform_int_distribution<std::uint32_t> code(0, 4095);
  std::uniform_int_distribution<std::uint32_t> normal(0, 5);
  std::uniform_int_distribution<std::uint32_t> bytes(1, 1u << 20);
  SegmentIndex index;
  index.representation_count = static_cast<std::uint16_t>(reps(rng));
  std::uint32_t start = 0;
  const int g = gofs(rng);
  for (int i = 0; i < g; ++i) {
    GofIndexEntry e;
    e.start_time = start;
    e.duration = 4000;
    e.frame_count = 4;
    start += e.duration;
    std::set<std::uint32_t> codes;
    const int count = tiles(rng);
    while (static_cast<int>(codes.size()) < count) codes.insert(code(rng));
    for (std::uint32_t c : codes) {
      TileIndexEntry te;
      te.morton_code = c;
      te.normal_code = normal(rng);
      for (int m = 0; m < index.representation_count; ++m) te.byte_count.push_back(bytes(rng));
      e.tiles.push_back(std::move(te));
    }
    for (int m = 0; m < index.representation_count; ++m) {
      e.per_representation.push_back({bytes(rng), 16});
    }
    index.gofs.push_back(std::move(e));
  }
  return index;
}

// 2. Index bitrate and encoded sizes.
Outcome index_sizes() {
  Outcome o;
  const double rate = index_bitrate(100, 4, 30, 4);
  if (rate != 120000.0) o.pass = false;
  std::mt19937 rng(2);
  int mismatches = 0;
  for (int i = 0; i < 1000; ++i) {
    const SegmentIndex idx = random_index(rng);
    const auto bytes = serialize_index(idx);
    const std::size_t want = closed_form_bytes(idx);
    if (bytes.size() != want || serialized_size(idx) != want || parse_index(bytes) != idx) {
      ++mismatches;
    }
  }
  if (mismatches) o.pass = false;
  o.detail = fmt("index_bitrate(100,4,30,4) = %.17g bps, %d/1000 size mismatches", rate,
                 mismatches);
  return o;
}

// 3. Morton round trip.
Outcome morton() {
  Outcome o;
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> depth_dist(1, kMaxTileDepth);
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const int depth = depth_dist(rng);
    std::uniform_int_distribution<std::uint32_t> c(0, (1u << depth) - 1);
    const TileCoord p{c(rng), c(rng), c(rng)};
    const std::uint32_t code = morton_encode(p.x, p.y, p.z, depth);
    if (morton_decode(code, depth) != p) ++failures;
  }
  const std::uint32_t ex = morton_encode(1, 2, 4);
  if (failures || ex != 273u) o.pass = false;
  o.detail = fmt("%d/10000 round-trip failures, (1,2,4) -> %u", failures, ex);
  return o;
}

// 4. Greedy allocation against exhaustive search and Lagrangian optimality.
Outcome optimizer() {
  const auto start = Clock::now();
  Outcome o;
  std::mt19937 rng(4);
  int utility_mismatch = 0;
  int lagrange_failures = 0;
  std::uniform_int_distribution<int> kdist(1, 8);
  std::uniform_real_distribution<double> frac(0.0, 1.0);

  const auto lagrangian_ok = [](const std::vector<TileChoice>& tiles, const AllocationPlan& p) {
    for (const auto& t : tiles) {
      const auto best = lagrangian_argmax(t, p.final_lambda);
      if (std::find(best.begin(), best.end(), p.selection(t)) == best.end()) return false;
    }
    return true;
  };

  for (int inst = 0; inst < 1000; ++inst) {
    const int k = kdist(rng);
    std::vector<TileChoice> tiles;
    for (int i = 0; i < k; ++i) {
      tiles.push_back(fixtures::hull_tile(rng, static_cast<std::uint32_t>(i), 5, inst % 2 == 1));
    }
    const double budget = std::floor(frac(rng) * (fixtures::max_total_cost(tiles) + 1.0));
    const AllocationPlan plan = greedy_allocate(tiles, budget, BudgetMode::kStrict);
    const AllocationPlan oracle = brute_force_allocate(tiles, plan.requested_bits);
    if (plan.total_utility != oracle.total_utility) ++utility_mismatch;
    if (!lagrangian_ok(tiles, plan)) ++lagrange_failures;
  }
  // Arbitrary (non-hull) point sets with nonzero buffered rungs, both modes.
  for (int inst = 0; inst < 1000; ++inst) {
    const int k = kdist(rng);
    std::vector<TileChoice> tiles;
    for (int i = 0; i < k; ++i) {
      tiles.push_back(fixtures::random_tile(rng, static_cast<std::uint32_t>(i), 5, true));
    }
    const double budget = frac(rng) * fixtures::max_total_cost(tiles);
    for (BudgetMode mode : {BudgetMode::kStrict, BudgetMode::kOvershoot}) {
      if (!lagrangian_ok(tiles, greedy_allocate(tiles, budget, mode))) ++lagrange_failures;
    }
  }
  const double secs = seconds_since(start);
  if (utility_mismatch || lagrange_failures || secs >= 30.0) o.pass = false;
  o.detail = fmt("%d/1000 utility mismatches, %d/3000 Lagrangian failures, %.2f s",
                 utility_mismatch, lagrange_failures, secs);
  return o;
}

// 5. Utility normalization, misprediction bounds and LOD regimes.
Outcome utility() {
  Outcome o;
  const auto ladder = default_ladder_bps();
  const UtilityCoeffs c = normalize_coeffs(ladder);
  const double u0 = bandwidth_utility(0.0, c);
  const double u1 = bandwidth_utility(ladder.front(), c);
  const double um = bandwidth_utility(ladder.back(), c);
  if (u0 != 0.0 || std::abs(u1 - c.alpha) > 1e-9 || std::abs(um - 1.0) > 1e-9) o.pass = false;

  const WindowEdges w{10.0, 15.0, 5.0};
  const double lo = p_err(10.0, w);
  const double hi = p_err(15.0, w);
  if (lo != 0.1 || hi != 0.4) o.pass = false;

  ObjectManifest m;
  m.max_width = 1024;
  m.tile_width = 64;
  m.cube_to_object_scale = 0.001;
  m.representations = {{"a", 4e6, 512, 30.0}};
  Viewpoint v;
  v.frustum.horz_fov = std::numbers::pi / 2.0;
  v.display.horz_pixels = 1280;
  const double near = distinguishable_voxels_at(m.representation(1), m, 0.32, v).lod;
  const double far = distinguishable_voxels_at(m.representation(1), m, 4.0, v).lod;
  const double distant = distinguishable_voxels_at(m.representation(1), m, 1e4, v).lod;
  if (near != 1024.0 || far != 196.0 || distant != 1.0) o.pass = false;

  o.detail = fmt("u(0)=%g u(B1)-alpha=%.2g u(BM)=%.12g pErr=[%g, %g] LOD=%g/%g/%g", u0,
                 u1 - c.alpha, um, lo, hi, near, far, distant);
  return o;
}

RunResult timed_run(const Scenario& s, double& secs) {
  const auto start = Clock::now();
  RunResult r = run(s);
  secs = std::max(secs, seconds_since(start));
  return r;
}

// 6. Adaptivity against throughput- and buffer-based baselines at depth 0.
Outcome adaptivity() {
  Outcome o;
  double slowest = 0.0;
  std::map<std::string, std::map<std::string, Summary>> by_net;
  for (const char* net : {"stable", "variable"}) {
    for (const char* algo : {"stripped-wba", "tba", "bba"}) {
      const Scenario s = scenario(fmt(
          R"({"tileDepth":0,"duration":120,"network":"%s","algorithm":"%s","seed":1})", net,
          algo));
      by_net[net][algo] = timed_run(s, slowest).summary;
    }
  }
  const auto bw = [&](const char* net, const char* algo) {
    return by_net[net][algo].avg_selected_bandwidth;
  };
  std::size_t stalls = 0;
  for (auto& [net, runs] : by_net) {
    for (auto& [algo, s] : runs) stalls += s.stall_count;
  }
  const bool stable_ok = bw("stable", "stripped-wba") >= bw("stable", "tba") &&
                         bw("stable", "stripped-wba") >= bw("stable", "bba");
  const bool variable_order = bw("variable", "stripped-wba") > bw("variable", "tba") &&
                              bw("variable", "tba") > bw("variable", "bba");
  const bool margin = bw("variable", "stripped-wba") >= 1.1 * bw("variable", "tba");
  o.pass = stable_ok && variable_order && margin && stalls == 0 && slowest < 10.0;
  o.detail = fmt(
      "stable WBA/TBA/BBA = %.3f/%.3f/%.3f Mbps, variable = %.3f/%.3f/%.3f Mbps "
      "(WBA/TBA %.3f), stalls %zu, slowest run %.2f s",
      bw("stable", "stripped-wba") / 1e6, bw("stable", "tba") / 1e6, bw("stable", "bba") / 1e6,
      bw("variable", "stripped-wba") / 1e6, bw("variable", "tba") / 1e6,
      bw("variable", "bba") / 1e6, bw("variable", "stripped-wba") / bw("variable", "tba"),
      stalls, slowest);
  return o;
}

// 7. Delivered utility grows with tile depth.
Outcome tile_depth() {
  Outcome o;
  double slowest = 0.0;
  for (const char* net : {"stable", "variable"}) {
    std::vector<double> u;
    for (int depth = 0; depth <= 2; ++depth) {
      const Scenario s = scenario(fmt(
          R"({"tileDepth":%d,"duration":60,"camera":"path1","network":"%s","algorithm":"wba"})",
          depth, net));
      u.push_back(timed_run(s, slowest).summary.total_delivered_utility);
    }
    const bool ok = u[1] >= u[0] && u[2] >= u[1] && u[2] >= 1.05 * u[0];
    if (!ok) o.pass = false;
    o.detail += fmt("%s %.4g/%.4g/%.4g (x%.2f) ", net, u[0], u[1], u[2], u[2] / u[0]);
  }
  return o;
}

// 8. Reaction to a 180 degree flip.
Outcome responsiveness() {
  Outcome o;
  int ok = 0;
  double worst = 0.0;
  std::size_t min_planned = std::numeric_limits<std::size_t>::max();
  for (int seed = 1; seed <= 100; ++seed) {
    const Scenario s = scenario(fmt(
        R"({"duration":20,"tileDepth":2,"camera":{"kind":"static","distance":2,"flipTimes":[10]},"algorithm":"wba","seed":%d})",
        seed));
    const RunResult r = run(s);
    if (r.flips.size() != 1) continue;
    const FlipRecord& f = r.flips.front();
    const double latency = f.latency < 0.0 ? std::numeric_limits<double>::infinity() : f.latency;
    worst = std::max(worst, latency);
    min_planned = std::min(min_planned, f.planned);
    if (f.newly_visible > 0 && f.planned > 0 && latency <= 1.0) ++ok;
  }
  o.pass = ok == 100;
  o.detail = fmt("%d/100 runs answered in the next plan within 1.0 s, worst latency %.3f s, "
                 "fewest planned tiles %zu",
                 ok, worst, min_planned);
  return o;
}

// 9. Second pass of a looped clip plays at least the first pass quality.
Outcome looping() {
  Outcome o;
  int ok = 0;
  double worst_gain = std::numeric_limits<double>::infinity();
  for (int seed = 1; seed <= 20; ++seed) {
    const Scenario s = scenario(fmt(
        R"({"duration":40,"tileDepth":2,"objects":[{"loop":true,"clipDuration":20}],"camera":{"kind":"static","distance":2},"algorithm":"wba","seed":%d})",
        seed));
    auto passes = run(s).summary.passes;
    std::sort(passes.begin(), passes.end(),
              [](const PassStats& a, const PassStats& b) { return a.pass < b.pass; });
    if (passes.size() < 2) continue;
    const double gain = passes[1].average() - passes[0].average();
    worst_gain = std::min(worst_gain, gain);
    if (gain >= 0.0) ++ok;
  }
  o.pass = ok == 20;
  o.detail = fmt("%d/20 seeds with pass-2 >= pass-1, smallest gain %.3f", ok, worst_gain);
  return o;
}

// 10. Visible objects are favored and hidden ones are still covered.
Outcome multi_object() {
  Outcome o;
  const Scenario s = scenario(R"({"duration":60,"tileDepth":2,"multiObject":5,"algorithm":"wba"})");
  const RunResult r = run(s);
  int compared = 0;
  int bad = 0;
  for (const auto& row : r.metrics) {
    double vis = 0.0;
    double hid = 0.0;
    int nv = 0;
    int nh = 0;
    for (std::size_t i = 0; i < row.per_object_selected.size(); ++i) {
      if (row.per_object_visible[i]) {
        vis += row.per_object_selected[i];
        ++nv;
      } else {
        hid += row.per_object_selected[i];
        ++nh;
      }
    }
    if (nv == 0 || nh == 0) continue;
    ++compared;
    if (vis / nv < hid / nh) ++bad;
  }
  double min_cov = 1.0;
  for (std::size_t i = 0; i < r.summary.final_window_coverage.size(); ++i) {
    if (!r.summary.final_visible[i]) {
      min_cov = std::min(min_cov, r.summary.final_window_coverage[i]);
    }
  }
  o.pass = bad == 0 && min_cov >= 0.9;
  o.detail = fmt("%d/%d opportunities with visible < hidden, min hidden coverage %.3f", bad,
                 compared, min_cov);
  return o;
}

// 11. Re-running a scenario reproduces metrics.csv byte for byte.
Outcome determinism() {
  Outcome o;
  const std::vector<std::string> docs{
      R"({"duration":30,"tileDepth":2,"camera":"path2","network":"variable","algorithm":"wba","seed":7})",
      R"({"duration":30,"tileDepth":1,"camera":"path1","network":"stable","algorithm":"bba","seed":3})",
      R"({"duration":20,"tileDepth":2,"multiObject":5,"algorithm":"wba","seed":11})"};
  int equal = 0;
  for (const auto& doc : docs) {
    const Scenario s = scenario(doc);
    std::ostringstream a;
    std::ostringstream b;
    write_metrics_csv(a, run(s));
    write_metrics_csv(b, run(s));
    if (a.str() == b.str() && !a.str().empty()) ++equal;
  }
  o.pass = equal == static_cast<int>(docs.size());
  o.detail = fmt("%d/%zu scenarios byte-identical", equal, docs.size());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  int only = 0;
  app.add_option("--criterion", only, "Run a single criterion (1-11)")->check(CLI::Range(1, 11));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"window math", window_math},     {"segment index", index_sizes},
      {"morton", morton},               {"optimizer", optimizer},
      {"utility model", utility},       {"network adaptivity", adaptivity},
      {"tile depth", tile_depth},       {"responsiveness", responsiveness},
      {"looping", looping},             {"multi-object", multi_object},
      {"determinism", determinism}};

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i) + 1;
    if (only && n != only) continue;
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    all = all && out.pass;
    std::printf("criterion %2d %-20s %s  %s\n", n, criteria[i].first, out.pass ? "PASS" : "FAIL",
                out.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
