#include "volu/client_buffer_manager.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <tuple>

#include "volu/errors.hpp"
#include "volu/manifest_io.hpp"

namespace volu {
namespace {

constexpr double kTimeEps = 1e-9;

std::vector<double> ladder_of(const ObjectManifest& m) {
  std::vector<double> out;
  for (const auto& r : m.representations) out.push_back(r.bandwidth);
  return out;
}

void check_ladder(std::span<const double> ladder) {
  if (ladder.empty()) throw DomainError("empty bandwidth ladder");
}

}  // namespace

Algorithm parse_algorithm(const std::string& name) {
  if (name == "wba") return Algorithm::kWba;
  if (name == "stripped-wba") return Algorithm::kStrippedWba;
  if (name == "tba") return Algorithm::kTba;
  if (name == "bba") return Algorithm::kBba;
  throw ConfigError("unknown algorithm '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kWba: return "wba";
    case Algorithm::kStrippedWba: return "stripped-wba";
    case Algorithm::kTba: return "tba";
    case Algorithm::kBba: return "bba";
  }
  return "wba";
}

void CbmConfig::validate() const {
  if (!(cycle > 0.0)) throw ValidationError("cycle T must be > 0");
  if (smoothing < 0.0 || smoothing >= 1.0) {
    throw ValidationError("smoothing weight must lie in [0, 1)");
  }
  if (startup_seconds < 0.0) throw ValidationError("startup must be >= 0");
  if (!(tba_safety > 0.0)) throw ValidationError("TBA safety must be > 0");
  if (bba_reservoir < 0.0 || !(bba_cushion > bba_reservoir)) {
    throw ValidationError("BBA needs 0 <= reservoir < cushion");
  }
  if (!(queue_cap > 0.0)) throw ValidationError("queue cap must be > 0");
  if (chunk_gofs < 1) throw ValidationError("chunk must hold >= 1 GOF");
}

// ---------------------------------------------------------------------------

ThroughputEstimator::ThroughputEstimator(double weight) : weight_(weight) {
  if (weight < 0.0 || weight >= 1.0) {
    throw ValidationError("smoothing weight must lie in [0, 1)");
  }
}

double ThroughputEstimator::update(double bits, double elapsed) {
  if (!(elapsed > 0.0)) throw DomainError("elapsed time must be > 0");
  const double sample = bits / elapsed;
  if (!initialized_) {
    estimate_ = sample;
    initialized_ = true;
  } else {
    estimate_ = weight_ * estimate_ + (1.0 - weight_) * sample;
  }
  return estimate_;
}

void ThroughputEstimator::set(double estimate) {
  estimate_ = estimate;
  initialized_ = true;
}

int stripped_wba_select(std::span<const double> ladder, double throughput,
                        double cycle, double uncovered_media) {
  check_ladder(ladder);
  if (!(uncovered_media > 0.0)) return static_cast<int>(ladder.size());
  const double bound = throughput * cycle / uncovered_media;
  int best = 1;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < bound) best = static_cast<int>(i) + 1;
  }
  return best;
}

int tba_select(std::span<const double> ladder, double throughput,
               double safety) {
  check_ladder(ladder);
  const double bound = safety * throughput;
  int best = 1;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] <= bound) best = static_cast<int>(i) + 1;
  }
  return best;
}

int bba_select(std::span<const double> ladder, double occupancy,
               double reservoir, double cushion) {
  check_ladder(ladder);
  const int top = static_cast<int>(ladder.size());
  if (occupancy <= reservoir) return 1;
  if (occupancy >= cushion) return top;
  const double frac = (occupancy - reservoir) / (cushion - reservoir);
  return std::clamp(1 + static_cast<int>(std::floor(frac * (top - 1))), 1, top);
}

std::vector<double> RequestPlan::cumulative_bits() const {
  std::vector<double> marks;
  marks.reserve(indexes.size() + tiles.size());
  double sum = 0.0;
  for (const auto& i : indexes) marks.push_back(sum += i.bits);
  for (const auto& t : tiles) marks.push_back(sum += t.bits);
  return marks;
}

void write_request_log_csv(std::ostream& out,
                           std::span<const RequestLogRow> rows) {
  out << "i,t,C,budget_bits,planned_bits,index_bits,num_tiles,num_upgrades,"
         "final_lambda\n";
  for (const auto& r : rows) {
    out << r.i << ',' << r.t << ',' << r.estimate << ',' << r.budget_bits << ','
        << r.planned_bits << ',' << r.index_bits << ',' << r.tiles << ','
        << r.upgrades << ',' << r.final_lambda << '\n';
  }
}

// ---------------------------------------------------------------------------

ClientBufferManager::ClientBufferManager(std::vector<SyntheticObject> sources,
                                         std::vector<ObjectTimeline> timelines,
                                         CbmConfig config, WindowConfig window,
                                         PredictorConfig predictor)
    : sources_(std::move(sources)),
      config_(config),
      predictor_(predictor),
      estimator_(config.smoothing) {
  config_.validate();
  predictor_.validate();
  if (sources_.empty()) throw ConfigError("at least one object is required");
  if (timelines.size() != sources_.size()) {
    throw ConfigError("one timeline per object is required");
  }
  std::vector<ObjectManifest> manifests;
  for (const auto& s : sources_) {
    manifests.push_back(s.manifest());
    coeffs_.push_back(normalize_coeffs(s.manifest()));
  }
  index_cache_.resize(sources_.size());
  tails_.reserve(timelines.size());
  for (const auto& t : timelines) tails_.push_back(t.tau0);
  buffer_ = WindowedBuffer(std::move(manifests), std::move(timelines), window);
}

const SyntheticObject& ClientBufferManager::source(std::size_t object) const {
  if (object >= sources_.size()) throw RangeError("object index out of range");
  return sources_[object];
}

const UtilityCoeffs& ClientBufferManager::coeffs(std::size_t object) const {
  return coeffs_.at(object);
}

double ClientBufferManager::tile_bits(const GofIndexEntry& gof,
                                      std::size_t tile_pos, int m) {
  return 8.0 * gof.tiles.at(tile_pos).byte_count.at(static_cast<std::size_t>(m - 1));
}

const SegmentIndex& ClientBufferManager::source_index(std::size_t object,
                                                      int segment) {
  auto& cache = index_cache_.at(object);
  auto it = cache.find(segment);
  if (it == cache.end()) {
    it = cache.emplace(segment, sources_[object].segment_index(segment)).first;
  }
  return it->second;
}

std::vector<ClientBufferManager::GofSpan> ClientBufferManager::gofs_between(
    std::size_t object, double from, double to) {
  std::vector<GofSpan> out;
  if (!(to > from)) return out;
  const auto& m = sources_[object].manifest();
  const auto& o = buffer_.window().timeline(object);
  const double len = o.clip_length();
  for (const auto& [pass, seg] :
       buffer_.segments_covering(object, from, to - kTimeEps)) {
    const SegmentIndex& idx = source_index(object, seg);
    for (std::size_t g = 0; g < idx.gofs.size(); ++g) {
      const auto& gof = idx.gofs[g];
      const double start = static_cast<double>(gof.start_time) / m.timescale +
                           (o.loop ? pass * len : 0.0);
      if (start < from - kTimeEps || start >= to - kTimeEps) continue;
      GofSpan s;
      s.pass = pass;
      s.segment = seg;
      s.gof = static_cast<int>(g);
      s.start = start;
      s.end = start + static_cast<double>(gof.duration) / m.timescale;
      out.push_back(s);
    }
  }
  return out;
}

void ClientBufferManager::fetch_index(RequestPlan& plan, std::size_t object,
                                      int segment) {
  if (buffer_.has_index(object, segment)) return;
  const auto bytes = sources_[object].index_bytes(segment);
  IndexFetch f;
  f.object = static_cast<std::uint32_t>(object);
  f.segment = segment;
  f.bits = 8.0 * static_cast<double>(bytes.size());
  plan.indexes.push_back(f);
  plan.index_bits += f.bits;
  // The index travels ahead of any tile in the same transfer, so the plan
  // may already use it.
  buffer_.put_index(object, segment, parse_index(bytes));
}

void ClientBufferManager::fetch_indexes(RequestPlan& plan, std::size_t object,
                                        double from, double to) {
  for (const auto& [pass, seg] : buffer_.segments_covering(object, from, to)) {
    (void)pass;
    fetch_index(plan, object, seg);
  }
}

void ClientBufferManager::add_gof_tiles(RequestPlan& plan, std::size_t object,
                                        const GofSpan& g, int m) {
  const auto& gof =
      buffer_.index(object, g.segment).gofs.at(static_cast<std::size_t>(g.gof));
  for (std::size_t p = 0; p < gof.tiles.size(); ++p) {
    TileRequest r;
    r.key = TileKey{static_cast<std::uint32_t>(object),
                    static_cast<std::uint32_t>(g.segment),
                    static_cast<std::uint32_t>(g.gof), gof.tiles[p].morton_code};
    r.previous = buffer_.store().representation(r.key);
    if (r.previous >= m) continue;
    r.m = m;
    r.bits = tile_bits(gof, p, m);
    r.media_time = g.start;
    plan.tiles.push_back(r);
  }
}

void ClientBufferManager::finalize(RequestPlan& plan) const {
  // Trailing-edge content first; each (object, segment, m) group stays
  // contiguous so it maps onto one multipart response.
  std::map<std::tuple<std::uint32_t, int, int>, double> first_media;
  for (const auto& t : plan.tiles) {
    const auto key = std::make_tuple(t.key.object, static_cast<int>(t.key.segment), t.m);
    auto [it, inserted] = first_media.emplace(key, t.media_time);
    if (!inserted) it->second = std::min(it->second, t.media_time);
  }
  std::stable_sort(plan.tiles.begin(), plan.tiles.end(),
                   [&](const TileRequest& a, const TileRequest& b) {
                     const auto ka = std::make_tuple(
                         a.key.object, static_cast<int>(a.key.segment), a.m);
                     const auto kb = std::make_tuple(
                         b.key.object, static_cast<int>(b.key.segment), b.m);
                     if (ka != kb) {
                       const double ma = first_media.at(ka);
                       const double mb = first_media.at(kb);
                       if (ma != mb) return ma < mb;
                       return ka < kb;
                     }
                     if (a.key.gof != b.key.gof) return a.key.gof < b.key.gof;
                     return a.key.morton < b.key.morton;
                   });

  plan.groups.clear();
  plan.tile_bits = 0.0;
  plan.upgrades = 0;
  for (std::size_t i = 0; i < plan.tiles.size();) {
    const auto& head = plan.tiles[i];
    RangeGroup g;
    g.object = head.key.object;
    g.segment = static_cast<int>(head.key.segment);
    g.m = head.m;
    const auto& manifest = buffer_.manifest(g.object);
    g.resource = manifest.media_name(g.m, manifest.start_number + g.segment);
    const SegmentIndex& idx = buffer_.index(g.object, g.segment);
    std::size_t j = i;
    for (; j < plan.tiles.size(); ++j) {
      const auto& t = plan.tiles[j];
      if (t.key.object != g.object || static_cast<int>(t.key.segment) != g.segment ||
          t.m != g.m) {
        break;
      }
      const auto& gof = idx.gofs.at(t.key.gof);
      const auto pos = static_cast<std::size_t>(
          std::lower_bound(gof.tiles.begin(), gof.tiles.end(), t.key.morton,
                           [](const TileIndexEntry& e, std::uint32_t code) {
                             return e.morton_code < code;
                           }) -
          gof.tiles.begin());
      const ByteRange r = tile_byte_range(gof, pos, g.m);
      if (!g.ranges.empty() &&
          g.ranges.back().offset + g.ranges.back().length == r.offset) {
        g.ranges.back().length += r.length;
      } else {
        g.ranges.push_back(r);
      }
      g.bits += t.bits;
      plan.tile_bits += t.bits;
      if (t.previous > 0) ++plan.upgrades;
    }
    plan.groups.push_back(std::move(g));
    i = j;
  }
}

RequestPlan ClientBufferManager::startup_index_plan(double t) {
  RequestPlan plan;
  plan.issued_at = t;
  for (std::size_t o = 0; o < sources_.size(); ++o) {
    const double manifest_bits =
        8.0 * static_cast<double>(write_manifest_json(sources_[o].manifest()).size());
    plan.indexes.push_back({static_cast<std::uint32_t>(o), -1, manifest_bits});
    plan.index_bits += manifest_bits;
    const auto& tl = buffer_.window().timeline(o);
    const double span = std::max(config_.startup_seconds * tl.speed, kTimeEps);
    fetch_indexes(plan, o, tl.tau0, tl.tau0 + span - kTimeEps);
  }
  return plan;
}

RequestPlan ClientBufferManager::startup_tile_plan(double t) {
  RequestPlan plan;
  plan.issued_at = t;
  plan.estimate = estimator_.estimate();
  for (std::size_t o = 0; o < sources_.size(); ++o) {
    const auto& tl = buffer_.window().timeline(o);
    const double end = tl.tau0 + config_.startup_seconds * tl.speed;
    fetch_indexes(plan, o, tl.tau0, std::max(tl.tau0, end - kTimeEps));
    double tail = tl.tau0;
    for (const auto& g : gofs_between(o, tl.tau0, end)) {
      fetch_index(plan, o, g.segment);
      add_gof_tiles(plan, o, g, 1);
      tail = std::max(tail, g.end);
    }
    tails_[o] = tail;
  }
  finalize(plan);
  return plan;
}

void ClientBufferManager::start_playback(double t0) {
  buffer_.window().start(t0);
}

RequestPlan ClientBufferManager::plan(double t, std::span<const Viewpoint> views) {
  if (config_.algorithm == Algorithm::kWba) return wba_step(t, views);
  return queue_step(t);
}

RequestPlan ClientBufferManager::wba_step(double t,
                                          std::span<const Viewpoint> views) {
  RequestPlan plan;
  plan.issued_at = t;
  plan.estimate = estimator_.estimate();
  const std::size_t objects = sources_.size();
  std::vector<WindowEdges> edges(objects);
  for (std::size_t o = 0; o < objects; ++o) {
    edges[o] = buffer_.window().edges(t, o);
    fetch_indexes(plan, o, edges[o].trail,
                  std::max(edges[o].trail, edges[o].lead - kTimeEps));
  }

  const auto window_tiles = buffer_.tiles_in_window(t);
  std::vector<TileChoice> choices;
  choices.reserve(window_tiles.size());
  for (const auto& w : window_tiles) {
    const std::size_t o = w.key.object;
    const auto& manifest = buffer_.manifest(o);
    const auto& gof = buffer_.index(o, static_cast<int>(w.key.segment)).gofs.at(w.key.gof);
    const double tau = std::clamp(w.media_time, edges[o].trail, edges[o].lead);
    const double perr = p_err(tau, edges[o], predictor_);
    TileGeometry geom{tile_world_position(manifest, w.key.morton), w.normal_code};

    TileChoice c;
    c.key = w.key;
    c.utility = tile_utilities(geom, views, manifest, coeffs_[o], perr);
    c.bit_count.assign(c.utility.size(), 0.0);
    for (int m = 1; m <= manifest.representation_count(); ++m) {
      c.bit_count[static_cast<std::size_t>(m)] = tile_bits(gof, w.tile_pos, m);
    }
    c.buffered = c.n = buffer_.store().representation(w.key);
    choices.push_back(std::move(c));
  }

  plan.budget_bits = std::max(0.0, estimator_.estimate() * config_.cycle - plan.index_bits);
  const AllocationPlan alloc =
      greedy_allocate_in_place(choices, plan.budget_bits, config_.budget_mode);
  plan.final_lambda = alloc.final_lambda;
  last_trace_ = alloc.trace;

  for (std::size_t i = 0; i < choices.size(); ++i) {
    const auto& c = choices[i];
    if (c.n == c.buffered) continue;
    TileRequest r;
    r.key = c.key;
    r.m = c.n;
    r.previous = c.buffered;
    r.bits = c.bit_count[static_cast<std::size_t>(c.n)];
    r.media_time = window_tiles[i].media_time;
    plan.tiles.push_back(r);
  }
  finalize(plan);
  return plan;
}

double ClientBufferManager::queue_occupancy(double t, std::size_t object) const {
  const auto& tl = buffer_.window().timeline(object);
  const double trail = buffer_.window().w_trail(t, object);
  return std::max(0.0, (tails_[object] - trail) / tl.speed);
}

RequestPlan ClientBufferManager::queue_step(double t) {
  RequestPlan plan;
  plan.issued_at = t;
  plan.estimate = estimator_.estimate();
  const std::size_t objects = sources_.size();
  const double c = estimator_.estimate();
  const WindowState& win = buffer_.window();

  // Media each object needs next, and the rung to fetch it at.
  std::vector<std::pair<double, double>> ranges(objects);
  std::vector<int> rungs(objects, 1);
  if (config_.algorithm == Algorithm::kStrippedWba) {
    double uncovered = 0.0;
    for (std::size_t o = 0; o < objects; ++o) {
      const double target = win.w_lead(t + config_.cycle, o);
      const double from = std::max(tails_[o], win.w_trail(t, o));
      ranges[o] = {from, target};
      uncovered += std::max(0.0, target - from);
    }
    for (std::size_t o = 0; o < objects; ++o) {
      rungs[o] = stripped_wba_select(ladder_of(buffer_.manifest(o)), c,
                                     config_.cycle, uncovered);
    }
  } else {
    for (std::size_t o = 0; o < objects; ++o) {
      const auto& tl = win.timeline(o);
      const double occ = queue_occupancy(t, o);
      const auto ladder = ladder_of(buffer_.manifest(o));
      rungs[o] = config_.algorithm == Algorithm::kTba
                     ? tba_select(ladder, c, config_.tba_safety)
                     : bba_select(ladder, occ, config_.bba_reservoir,
                                  config_.bba_cushion);
      const double from = std::max(tails_[o], win.w_trail(t, o));
      if (occ >= config_.queue_cap) {
        ranges[o] = {from, from};
        continue;
      }
      // Enough media for chunk_gofs GOFs; the exact boundary comes from the
      // index below.
      const double gof_seconds =
          static_cast<double>(sources_[o].gof_frames()) /
          buffer_.manifest(o).max_frame_rate;
      double to = from + gof_seconds * config_.chunk_gofs - kTimeEps;
      if (!tl.loop) to = std::min(to, tl.clip_end);
      ranges[o] = {from, to};
    }
  }

  for (std::size_t o = 0; o < objects; ++o) {
    const auto [from, to] = ranges[o];
    if (!(to > from)) continue;
    auto gofs = gofs_between(o, from, to);
    if (config_.algorithm != Algorithm::kStrippedWba &&
        gofs.size() > static_cast<std::size_t>(config_.chunk_gofs)) {
      gofs.resize(static_cast<std::size_t>(config_.chunk_gofs));
    }
    for (const auto& g : gofs) {
      fetch_index(plan, o, g.segment);
      add_gof_tiles(plan, o, g, rungs[o]);
      tails_[o] = std::max(tails_[o], g.end);
    }
  }
  plan.budget_bits = c * config_.cycle;
  finalize(plan);
  return plan;
}

bool ClientBufferManager::deliver(const TileRequest& tile, double t) {
  const std::size_t o = tile.key.object;
  if (!buffer_.window().timeline(o).loop) {
    const auto next = buffer_.next_gof(o);
    if (!next || tile.media_time < next->media_start - kTimeEps) return false;
  }
  buffer_.store().receive(tile.key, tile.m, t);
  return true;
}

void ClientBufferManager::complete(const RequestPlan& plan, double started,
                                   double finished) {
  RequestLogRow row;
  row.i = log_.size();
  row.t = plan.issued_at;
  row.estimate = estimator_.estimate();
  row.budget_bits = plan.budget_bits;
  row.planned_bits = plan.total_bits();
  row.index_bits = plan.index_bits;
  row.tiles = plan.tiles.size();
  row.upgrades = plan.upgrades;
  row.final_lambda = plan.final_lambda;
  log_.push_back(row);
  if (plan.total_bits() > 0.0 && finished > started && std::isfinite(finished)) {
    estimator_.update(plan.total_bits(), finished - started);
  }
}

}  // namespace volu
