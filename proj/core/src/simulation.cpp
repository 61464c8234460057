#include "volu/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "volu/charts.hpp"
#include "volu/errors.hpp"
#include "volu/network_simulator.hpp"

namespace volu {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Tiles this close (media seconds) to the trailing edge count as trail-edge
// tiles when measuring the reaction to a viewpoint flip.
constexpr double kTrailEdgeSpan = 1.0;

class Runner {
 public:
  explicit Runner(const Scenario& sc) : sc_(sc), camera_(sc.camera) {
    sc.validate();
    network_ = sc.network;
    network_.seed = sc.seed;
    std::vector<SyntheticObject> sources;
    std::vector<ObjectTimeline> timelines;
    for (const auto& o : sc.objects) {
      sources.push_back(make_source(o, sc.tile_depth));
      const auto& m = sources.back().manifest();
      ObjectTimeline tl;
      tl.tau0 = o.tau0;
      tl.speed = o.speed;
      tl.clip_start = m.start_time;
      tl.clip_end = m.start_time + m.duration;
      tl.loop = o.loop;
      timelines.push_back(tl);
    }
    cbm_.emplace(std::move(sources), std::move(timelines), sc.cbm, sc.window,
                 sc.predictor);
    result_.summary.algorithm = to_string(sc.cbm.algorithm);
    for (const double f : sc.camera.flip_times) {
      if (sc.camera.kind == CameraKind::kStatic) result_.flips.push_back({f});
    }
  }

  RunResult run() {
    if (!startup()) return finish(now_);
    const double end = t0_ + sc_.duration;
    while (now_ < end && !finished()) {
      const double t = now_;
      const Viewpoint view = camera_.at(t);
      const std::vector<Viewpoint> views{view};
      RequestPlan plan = cbm().plan(t, views);
      auto flip = pending_flip(t);
      std::set<TileKey> newly_visible;
      if (flip) newly_visible = newly_visible_tiles(*flip, t, view);

      account_plan(plan, view);
      MetricsRow row = metrics_row(t, plan, view);
      std::vector<std::vector<WindowTile>> plan_window;
      for (std::size_t o = 0; o < cbm().object_count(); ++o) {
        plan_window.push_back(buffer().tiles_in_window(t, o, true));
      }

      std::vector<double> arrivals;
      if (plan.empty()) {
        advance(std::min(end, t + sc_.cbm.cycle), plan, arrivals);
      } else {
        const auto marks = plan.cumulative_bits();
        const TransferResult tr = simulate_transfer(network_, t, marks);
        arrivals = tr.mark_arrivals;
        advance(std::min(end, tr.completion), plan, arrivals);
        cbm().complete(plan, t, tr.completion);
        if (!std::isfinite(tr.completion)) now_ = end;
      }
      if (now_ < end || plan.empty()) update_coverage(plan_window, view);
      if (flip) {
        resolve_flip(*flip, plan, arrivals, newly_visible);
        row.response_latency = flip->latency;
      }
      if (sc_.record_optimizer_trace && sc_.cbm.algorithm == Algorithm::kWba) {
        record_trace(t);
      }
      result_.metrics.push_back(std::move(row));
    }
    return finish(std::min(now_, end));
  }

 private:
  ClientBufferManager& cbm() { return *cbm_; }
  WindowedBuffer& buffer() { return cbm_->buffer(); }

  bool startup() {
    RequestPlan p1 = cbm().startup_index_plan(0.0);
    const auto m1 = p1.cumulative_bits();
    const TransferResult r1 = simulate_transfer(network_, 0.0, m1);
    if (!std::isfinite(r1.completion)) return false;
    cbm().complete(p1, 0.0, r1.completion);
    now_ = r1.completion;

    RequestPlan p2 = cbm().startup_tile_plan(now_);
    account_plan(p2, camera_.at(now_));
    if (!p2.empty()) {
      const auto m2 = p2.cumulative_bits();
      const TransferResult r2 = simulate_transfer(network_, now_, m2);
      if (!std::isfinite(r2.completion)) return false;
      for (std::size_t i = 0; i < p2.tiles.size(); ++i) {
        cbm().deliver(p2.tiles[i], r2.mark_arrivals[p2.indexes.size() + i]);
      }
      cbm().complete(p2, now_, r2.completion);
      now_ = r2.completion;
    }
    t0_ = now_;
    result_.summary.startup_delay = t0_;
    cbm().start_playback(t0_);
    return true;
  }

  bool finished() const {
    for (std::size_t o = 0; o < cbm_->object_count(); ++o) {
      if (cbm_->buffer().next_gof(o)) return false;
    }
    return true;
  }

  // Runs arrivals and playback releases in time order up to `limit`.
  void advance(double limit, const RequestPlan& plan,
               const std::vector<double>& arrivals) {
    const std::size_t first_tile = plan.indexes.size();
    std::size_t next = first_tile;
    while (true) {
      const double arrival = next < arrivals.size() ? arrivals[next] : kInf;
      double release = kInf;
      std::size_t release_obj = 0;
      for (std::size_t o = 0; o < cbm_->object_count(); ++o) {
        const double r = buffer().next_release_time(now_, o);
        if (r < release) {
          release = r;
          release_obj = o;
        }
      }
      if (std::min(arrival, release) > limit) break;
      if (arrival <= release) {
        now_ = std::max(now_, arrival);
        const TileRequest& tile = plan.tiles[next - first_tile];
        cbm().deliver(tile, now_);
        ++next;
        if (auto r = buffer().try_resume(now_)) on_release(*r, now_);
      } else {
        now_ = std::max(now_, release);
        on_release(buffer().release_gof(release_obj, now_), now_);
      }
    }
    now_ = std::max(now_, limit);
  }

  double tile_value(std::size_t object, std::uint32_t morton,
                    std::uint32_t normal, int n, const Viewpoint& view,
                    bool* visible_out = nullptr) const {
    const auto& manifest = cbm_->buffer().manifest(object);
    const Vec3 pos = tile_world_position(manifest, morton);
    const bool visible = is_visible(pos, normal, view);
    if (visible_out) *visible_out = visible;
    if (!visible || n <= 0) return 0.0;
    const auto& rep = manifest.representation(n);
    const double dist =
        std::max((pos - view.position).norm(), 0.5 * manifest.tile_width_m());
    return bandwidth_utility(rep.bandwidth, cbm_->coeffs(object)) *
           distinguishable_voxels_at(rep, manifest, dist, view).lod;
  }

  void on_release(const ReleaseOutcome& out, double t) {
    if (out.stalled || out.tiles.empty()) return;
    const Viewpoint view = camera_.at(t);
    auto& passes = result_.summary.passes;
    const auto pass = static_cast<std::size_t>(std::max(0, out.gof.pass));
    while (passes.size() <= pass) {
      passes.push_back({static_cast<int>(passes.size())});
    }
    for (const auto& r : out.tiles) {
      bool visible = false;
      delivered_utility_ +=
          tile_value(r.key.object, r.key.morton, r.normal_code, r.n, view, &visible);
      if (visible) {
        passes[pass].sum_n += r.n;
        ++passes[pass].tiles;
      }
    }
  }

  void account_plan(const RequestPlan& plan, const Viewpoint& view) {
    for (const auto& t : plan.tiles) {
      const auto& manifest = cbm_->buffer().manifest(t.key.object);
      selected_bw_sum_ += manifest.representation(t.m).bandwidth;
      ++selected_tiles_;
      const auto& gof = cbm_->buffer().index(t.key.object, static_cast<int>(t.key.segment))
                            .gofs.at(t.key.gof);
      const auto it = std::lower_bound(
          gof.tiles.begin(), gof.tiles.end(), t.key.morton,
          [](const TileIndexEntry& e, std::uint32_t c) { return e.morton_code < c; });
      requested_utility_ +=
          tile_value(t.key.object, t.key.morton, it->normal_code, t.m, view);
    }
  }

  MetricsRow metrics_row(double t, const RequestPlan& plan, const Viewpoint& view) {
    MetricsRow row;
    row.t = t;
    row.est_throughput = plan.estimate;
    if (!plan.tiles.empty()) {
      double sum = 0.0;
      for (const auto& tile : plan.tiles) {
        sum += buffer().manifest(tile.key.object).representation(tile.m).bandwidth;
      }
      row.selected_bandwidth_avg = sum / static_cast<double>(plan.tiles.size());
    }
    row.occupancy = buffer().occupancy(t);
    row.stall = buffer().stalled();

    std::map<TileKey, int> planned;
    for (const auto& tile : plan.tiles) planned[tile.key] = tile.m;
    const std::size_t objects = cbm_->object_count();
    row.per_object_utility.assign(objects, 0.0);
    row.per_object_selected.assign(objects, 0.0);
    row.per_object_visible.assign(objects, false);
    for (std::size_t o = 0; o < objects; ++o) {
      const auto tiles = buffer().tiles_in_window(t, o, true);
      double selected = 0.0;
      for (const auto& w : tiles) {
        const int n = buffer().store().representation(w.key);
        row.per_object_utility[o] += tile_value(o, w.key.morton, w.normal_code, n, view);
        const auto it = planned.find(w.key);
        selected += it == planned.end() ? n : std::max(n, it->second);
      }
      if (!tiles.empty()) row.per_object_selected[o] = selected / static_cast<double>(tiles.size());
      row.per_object_visible[o] = in_frustum(
          buffer().manifest(o).object_to_world_translation, view);
      row.total_utility_visible += row.per_object_utility[o];

      const WindowEdges e = buffer().window().edges(t, o);
      result_.buffer_trace.push_back(
          {t, o, e.trail, e.lead, buffer().occupancy(t, o), row.stall});
    }
    return row;
  }

  FlipRecord* pending_flip(double t) {
    for (auto& f : result_.flips) {
      if (f.plan_time < 0.0 && f.flip_time <= t) {
        f.plan_time = t;
        return &f;
      }
    }
    return nullptr;
  }

  std::set<TileKey> newly_visible_tiles(FlipRecord& flip, double t,
                                        const Viewpoint& after) {
    const Viewpoint before = camera_.at(flip.flip_time - 1e-6);
    std::set<TileKey> out;
    for (std::size_t o = 0; o < cbm_->object_count(); ++o) {
      const auto& manifest = buffer().manifest(o);
      const WindowEdges e = buffer().window().edges(t, o);
      const double speed = buffer().window().timeline(o).speed;
      for (const auto& w : buffer().tiles_in_window(t, o, true)) {
        if (w.media_time >= e.trail + kTrailEdgeSpan * speed) continue;
        const Vec3 pos = tile_world_position(manifest, w.key.morton);
        if (is_visible(pos, w.normal_code, after) &&
            !is_visible(pos, w.normal_code, before)) {
          out.insert(w.key);
        }
      }
    }
    flip.newly_visible = out.size();
    return out;
  }

  void resolve_flip(FlipRecord& flip, const RequestPlan& plan,
                    const std::vector<double>& arrivals,
                    const std::set<TileKey>& newly_visible) {
    double first = kInf;
    for (std::size_t i = 0; i < plan.tiles.size(); ++i) {
      const auto& tile = plan.tiles[i];
      if (!newly_visible.contains(tile.key) || tile.m <= tile.previous) continue;
      ++flip.planned;
      const std::size_t mark = plan.indexes.size() + i;
      if (mark < arrivals.size()) first = std::min(first, arrivals[mark]);
    }
    if (std::isfinite(first)) {
      flip.first_arrival = first;
      flip.latency = first - flip.flip_time;
    }
  }

  // Share of the tiles that were in the window at the last request
  // opportunity, and are still in it, which now hold a representation.
  void update_coverage(const std::vector<std::vector<WindowTile>>& plan_window,
                       const Viewpoint& view) {
    auto& s = result_.summary;
    s.final_window_coverage.assign(plan_window.size(), 1.0);
    s.final_visible.assign(plan_window.size(), false);
    for (std::size_t o = 0; o < plan_window.size(); ++o) {
      std::set<TileKey> current;
      for (const auto& w : buffer().tiles_in_window(now_, o, true)) current.insert(w.key);
      std::size_t total = 0;
      std::size_t held = 0;
      for (const auto& w : plan_window[o]) {
        if (!current.contains(w.key)) continue;
        ++total;
        if (buffer().store().representation(w.key) >= 1) ++held;
      }
      if (total > 0) {
        s.final_window_coverage[o] =
            static_cast<double>(held) / static_cast<double>(total);
      }
      s.final_visible[o] =
          in_frustum(buffer().manifest(o).object_to_world_translation, view);
    }
  }

  void record_trace(double t) {
    std::ostringstream out;
    for (const auto& s : cbm_->last_trace()) {
      out << trace_cycle_ << ',' << t << ',' << s.key.object << ','
          << s.key.segment << ',' << s.key.gof << ',' << s.key.morton << ','
          << s.lambda << ',' << s.m << ',' << s.consumed_bits << '\n';
    }
    ++trace_cycle_;
    result_.optimizer_trace += out.str();
  }

  RunResult finish(double t_end) {
    Summary& s = result_.summary;
    s.avg_selected_bandwidth =
        selected_tiles_ ? selected_bw_sum_ / static_cast<double>(selected_tiles_) : 0.0;
    s.stall_count = buffer().stalls().size();
    s.stall_seconds = buffer().stalled_seconds(t_end);
    double sum = 0.0;
    std::size_t tiles = 0;
    for (const auto& p : s.passes) {
      sum += p.sum_n;
      tiles += p.tiles;
    }
    s.avg_played_representation_visible = tiles ? sum / static_cast<double>(tiles) : 0.0;
    s.total_delivered_utility = delivered_utility_;
    s.total_requested_utility = requested_utility_;
    s.requests = cbm().request_log().size();

    std::vector<double> latencies;
    for (const auto& f : result_.flips) {
      latencies.push_back(f.latency >= 0.0 ? f.latency : kInf);
    }
    if (!latencies.empty()) {
      std::sort(latencies.begin(), latencies.end());
      const auto idx = static_cast<std::size_t>(
          std::ceil(0.95 * static_cast<double>(latencies.size()))) - 1;
      s.p95_response_latency = latencies[std::min(idx, latencies.size() - 1)];
    }

    if (!buffer().window().started()) s.startup_delay = kInf;
    result_.requests = cbm().request_log();
    if (sc_.record_optimizer_trace && !result_.optimizer_trace.empty()) {
      result_.optimizer_trace =
          "cycle,t,object,segment,gof,morton,lambda,m,consumed_bits\n" +
          result_.optimizer_trace;
    }
    return std::move(result_);
  }

  const Scenario& sc_;
  CameraPath camera_;
  NetworkProfile network_;
  std::optional<ClientBufferManager> cbm_;
  RunResult result_;
  double now_ = 0.0;
  double t0_ = 0.0;
  double selected_bw_sum_ = 0.0;
  std::size_t selected_tiles_ = 0;
  double delivered_utility_ = 0.0;
  double requested_utility_ = 0.0;
  std::size_t trace_cycle_ = 0;
};

}  // namespace

RunResult run(const Scenario& scenario) {
  Runner runner(scenario);
  return runner.run();
}

void write_metrics_csv(std::ostream& out, const RunResult& result) {
  const std::size_t objects =
      result.metrics.empty() ? 0 : result.metrics.front().per_object_utility.size();
  out << "t,est_throughput_bps,selected_bandwidth_avg_bps,occupancy_s,stall_flag,"
         "total_utility_visible";
  for (std::size_t o = 0; o < objects; ++o) out << ",utility_obj" << o;
  for (std::size_t o = 0; o < objects; ++o) out << ",selected_rep_obj" << o;
  for (std::size_t o = 0; o < objects; ++o) out << ",visible_obj" << o;
  out << ",response_latency_s\n";
  out.precision(10);
  for (const auto& r : result.metrics) {
    out << r.t << ',' << r.est_throughput << ',' << r.selected_bandwidth_avg << ','
        << r.occupancy << ',' << (r.stall ? 1 : 0) << ',' << r.total_utility_visible;
    for (double u : r.per_object_utility) out << ',' << u;
    for (double m : r.per_object_selected) out << ',' << m;
    for (bool v : r.per_object_visible) out << ',' << (v ? 1 : 0);
    out << ',';
    if (r.response_latency >= 0.0) out << r.response_latency;
    out << '\n';
  }
}

void write_buffer_trace_csv(std::ostream& out, const RunResult& result) {
  out << "t,object,w_trail,w_lead,occupancy_s,stall_flag\n";
  out.precision(10);
  for (const auto& r : result.buffer_trace) {
    out << r.t << ',' << r.object << ',' << r.w_trail << ',' << r.w_lead << ','
        << r.occupancy << ',' << (r.stall ? 1 : 0) << '\n';
  }
}

std::string summary_json(const RunResult& result) {
  using nlohmann::json;
  const Summary& s = result.summary;
  auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["algorithm"] = s.algorithm;
  j["startupDelay"] = num(s.startup_delay);
  j["avgSelectedBandwidth"] = num(s.avg_selected_bandwidth);
  j["stallCount"] = s.stall_count;
  j["stallSeconds"] = num(s.stall_seconds);
  j["avgPlayedRepresentationVisible"] = num(s.avg_played_representation_visible);
  json passes = json::array();
  for (const auto& p : s.passes) {
    passes.push_back({{"pass", p.pass}, {"avgPlayedRepresentationVisible", p.average()},
                      {"visibleTiles", p.tiles}});
  }
  j["passes"] = passes;
  j["totalDeliveredUtility"] = num(s.total_delivered_utility);
  j["totalRequestedUtility"] = num(s.total_requested_utility);
  j["p95ResponseLatency"] = num(s.p95_response_latency);
  j["requests"] = s.requests;
  json flips = json::array();
  for (const auto& f : result.flips) {
    flips.push_back({{"flipTime", f.flip_time}, {"planTime", f.plan_time},
                     {"newlyVisible", f.newly_visible}, {"planned", f.planned},
                     {"latency", f.latency >= 0.0 ? json(f.latency) : json(nullptr)}});
  }
  j["flips"] = flips;
  j["finalWindowCoverage"] = s.final_window_coverage;
  j["finalVisible"] = s.final_visible;
  return j.dump(2) + "\n";
}

void write_outputs(const RunResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    return out;
  };
  {
    auto out = open("metrics.csv");
    write_metrics_csv(out, result);
  }
  {
    auto out = open("summary.json");
    out << summary_json(result);
  }
  {
    auto out = open("buffer_trace.csv");
    write_buffer_trace_csv(out, result);
  }
  {
    auto out = open("requests.csv");
    write_request_log_csv(out, result.requests);
  }
  if (!result.optimizer_trace.empty()) {
    auto out = open("optimizer_trace.csv");
    out << result.optimizer_trace;
  }
  write_charts(result, dir / "charts");
}

}  // namespace volu
