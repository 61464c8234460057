#include "volu/window_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "volu/errors.hpp"

namespace volu {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTimeEps = 1e-9;

}  // namespace

void WindowConfig::validate() const {
  if (!(floor > 0.0) || floor > cap) {
    throw ValidationError("window needs 0 < floor <= cap");
  }
  if (ramp_end < 0.0) throw ValidationError("window ramp_end must be >= 0");
}

double window_size(double elapsed, const WindowConfig& config) {
  if (elapsed <= 0.0) return config.floor;
  if (config.ramp_end <= 0.0 || elapsed >= config.ramp_end) return config.cap;
  return config.floor + (config.cap - config.floor) * elapsed / config.ramp_end;
}

// ---------------------------------------------------------------------------
// WindowState

WindowState::WindowState(std::vector<ObjectTimeline> objects,
                         WindowConfig config)
    : objects_(std::move(objects)), config_(config) {
  config_.validate();
  for (const auto& o : objects_) {
    if (!(o.speed > 0.0)) throw ValidationError("playback speed must be > 0");
    if (!(o.clip_end > o.clip_start)) {
      throw ValidationError("clip end must follow clip start");
    }
  }
}

const ObjectTimeline& WindowState::timeline(std::size_t object) const {
  if (object >= objects_.size()) throw RangeError("object index out of range");
  return objects_[object];
}

double WindowState::elapsed(double t) const {
  if (!started_) return 0.0;
  double e = t - t0_ - paused_total_;
  if (paused_) e -= t - pause_started_;
  return std::max(0.0, e);
}

double WindowState::window_size_at(double t) const {
  return window_size(elapsed(t), config_);
}

double WindowState::w_trail(double t, std::size_t object) const {
  const auto& o = timeline(object);
  const double trail = o.tau0 + o.speed * elapsed(t);
  return o.loop ? trail : std::min(trail, o.clip_end);
}

double WindowState::w_lead(double t, std::size_t object) const {
  return edges(t, object).lead;
}

WindowEdges WindowState::edges(double t, std::size_t object) const {
  const auto& o = timeline(object);
  WindowEdges e;
  e.trail = w_trail(t, object);
  e.span = o.speed * window_size_at(t);
  e.lead = e.trail + e.span;
  if (!o.loop) e.lead = std::min(e.lead, o.clip_end);
  return e;
}

double WindowState::user_time_at_trail(double t, std::size_t object,
                                       double tau) const {
  if (paused_) return kInf;
  const auto& o = timeline(object);
  const double trail = o.tau0 + o.speed * elapsed(t);
  if (tau <= trail) return t;
  return t + (tau - trail) / o.speed;
}

void WindowState::pause(double t) {
  if (paused_) return;
  paused_ = true;
  pause_started_ = t;
}

void WindowState::resume(double t) {
  if (!paused_) return;
  paused_total_ += t - pause_started_;
  paused_ = false;
}

void WindowState::set_speed(double t, std::size_t object, double speed) {
  if (!(speed > 0.0)) throw ValidationError("playback speed must be > 0");
  auto& o = objects_.at(object);
  const double trail = o.tau0 + o.speed * elapsed(t);
  o.speed = speed;
  o.tau0 = trail - speed * elapsed(t);
}

void WindowState::seek(double t, std::size_t object, double tau) {
  auto& o = objects_.at(object);
  o.tau0 = tau - o.speed * elapsed(t);
}

// ---------------------------------------------------------------------------
// BufferStore

const BufferEntry* BufferStore::find(const TileKey& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

int BufferStore::representation(const TileKey& key) const {
  const BufferEntry* e = find(key);
  return e ? e->n : 0;
}

bool BufferStore::receive(const TileKey& key, int m, double t) {
  BufferEntry& e = entries_[key];
  if (m <= e.n) return false;
  e.n = m;
  e.received_at = t;
  return true;
}

// ---------------------------------------------------------------------------
// WindowedBuffer

WindowedBuffer::WindowedBuffer(std::vector<ObjectManifest> manifests,
                               std::vector<ObjectTimeline> timelines,
                               WindowConfig config)
    : manifests_(std::move(manifests)),
      window_(std::move(timelines), config),
      indexes_(manifests_.size()),
      cursors_(manifests_.size()) {
  if (manifests_.size() != window_.object_count()) {
    throw ValidationError("one timeline per manifest required");
  }
  for (std::size_t o = 0; o < manifests_.size(); ++o) {
    reset_cursor(o, window_.timeline(o).tau0);
  }
}

const ObjectManifest& WindowedBuffer::manifest(std::size_t object) const {
  if (object >= manifests_.size()) throw RangeError("object index out of range");
  return manifests_[object];
}

bool WindowedBuffer::has_index(std::size_t object, int segment) const {
  return indexes_.at(object).contains(segment);
}

const SegmentIndex& WindowedBuffer::index(std::size_t object,
                                          int segment) const {
  const auto& map = indexes_.at(object);
  const auto it = map.find(segment);
  if (it == map.end()) {
    throw MissingIndexError(object, static_cast<std::size_t>(segment));
  }
  return it->second;
}

void WindowedBuffer::put_index(std::size_t object, int segment,
                               SegmentIndex index) {
  indexes_.at(object)[segment] = std::move(index);
}

double WindowedBuffer::wrap(std::size_t object, double tau) const {
  const auto& o = window_.timeline(object);
  if (!o.loop) return tau;
  const double len = o.clip_length();
  double r = std::fmod(tau - o.clip_start, len);
  if (r < 0.0) r += len;
  return o.clip_start + r;
}

int WindowedBuffer::pass_of(std::size_t object, double tau) const {
  const auto& o = window_.timeline(object);
  if (!o.loop) return 0;
  return static_cast<int>(
      std::floor((tau - o.clip_start) / o.clip_length() + kTimeEps));
}

std::vector<std::pair<int, int>> WindowedBuffer::segments_covering(
    std::size_t object, double from, double to) const {
  const auto& m = manifest(object);
  const auto& o = window_.timeline(object);
  const int count = m.segment_count();
  std::vector<std::pair<int, int>> out;
  if (to < from) return out;
  if (!o.loop) {
    from = std::max(from, o.clip_start);
    to = std::min(to, o.clip_end - kTimeEps);
    if (to < from) return out;
  }
  const auto locate = [&](double tau) {
    const int pass = pass_of(object, tau);
    const double local = o.loop ? wrap(object, tau) : tau;
    int seg = static_cast<int>(
        std::floor((local - m.start_time) / m.segment_duration + kTimeEps));
    seg = std::clamp(seg, 0, count - 1);
    return std::pair<int, int>{pass, seg};
  };
  auto cur = locate(from);
  const auto last = locate(to);
  while (true) {
    out.push_back(cur);
    if (cur == last) break;
    if (++cur.second >= count) {
      cur.second = 0;
      ++cur.first;
    }
    if (cur.first > last.first) break;
  }
  return out;
}

std::vector<std::pair<int, int>> WindowedBuffer::segments_in_window(
    double t, std::size_t object) const {
  const WindowEdges e = window_.edges(t, object);
  auto segs = segments_covering(object, e.trail, std::max(e.trail, e.lead - kTimeEps));
  // A segment that starts exactly at the lead edge holds nothing in the window.
  const auto& m = manifest(object);
  const auto& o = window_.timeline(object);
  const double len = o.clip_length();
  while (segs.size() > 1) {
    const auto [pass, seg] = segs.back();
    const double start =
        m.start_time + seg * m.segment_duration + (o.loop ? pass * len : 0.0);
    if (start < e.lead - kTimeEps) break;
    segs.pop_back();
  }
  return segs;
}

double WindowedBuffer::gof_start_seconds(std::size_t object,
                                         const GofIndexEntry& gof) const {
  return static_cast<double>(gof.start_time) / manifest(object).timescale;
}

std::vector<WindowTile> WindowedBuffer::tiles_in_window(
    double t, std::size_t object, bool skip_missing) const {
  std::vector<WindowTile> out;
  const WindowEdges e = window_.edges(t, object);
  const auto next = next_gof(object);
  if (!next) return out;
  const double floor_start = next->media_start;
  const auto& o = window_.timeline(object);
  const double len = o.clip_length();
  for (const auto& [pass, seg] : segments_in_window(t, object)) {
    if (skip_missing && !has_index(object, seg)) continue;
    const SegmentIndex& idx = index(object, seg);
    for (std::size_t g = 0; g < idx.gofs.size(); ++g) {
      const auto& gof = idx.gofs[g];
      const double start =
          gof_start_seconds(object, gof) + (o.loop ? pass * len : 0.0);
      if (start < e.trail - kTimeEps || start >= e.lead - kTimeEps) continue;
      if (start < floor_start - kTimeEps) continue;  // already played
      for (std::size_t p = 0; p < gof.tiles.size(); ++p) {
        WindowTile w;
        w.key = TileKey{static_cast<std::uint32_t>(object),
                        static_cast<std::uint32_t>(seg),
                        static_cast<std::uint32_t>(g), gof.tiles[p].morton_code};
        w.media_time = start;
        w.pass = pass;
        w.tile_pos = p;
        w.normal_code = gof.tiles[p].normal_code;
        w.frame_count = gof.frame_count;
        w.gof_tile_count = gof.tiles.size();
        out.push_back(w);
      }
    }
  }
  return out;
}

std::vector<WindowTile> WindowedBuffer::tiles_in_window(double t) const {
  std::vector<WindowTile> out;
  for (std::size_t o = 0; o < object_count(); ++o) {
    auto part = tiles_in_window(t, o);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

void WindowedBuffer::reset_cursor(std::size_t object, double tau) {
  const auto& m = manifest(object);
  const auto& o = window_.timeline(object);
  Cursor c;
  c.pass = pass_of(object, tau);
  const double local = wrap(object, tau);
  c.segment = std::clamp(
      static_cast<int>(std::floor((local - m.start_time) / m.segment_duration +
                                  kTimeEps)),
      0, m.segment_count());
  if (!o.loop && local >= o.clip_end) c.segment = m.segment_count();
  c.gof = 0;
  cursors_.at(object) = c;
}

std::optional<GofRef> WindowedBuffer::ref_at(std::size_t object,
                                             const Cursor& start) const {
  const auto& m = manifest(object);
  const auto& o = window_.timeline(object);
  const double len = o.clip_length();
  const double floor_tau = o.tau0;  // nothing before the starting point plays
  Cursor c = start;
  for (int guard = 0; guard < 1000000; ++guard) {
    if (c.segment >= m.segment_count()) {
      if (!o.loop) return std::nullopt;
      c.segment = 0;
      c.gof = 0;
      ++c.pass;
    }
    const double offset = o.loop ? c.pass * len : 0.0;
    GofRef ref;
    ref.object = static_cast<std::uint32_t>(object);
    ref.pass = c.pass;
    ref.segment = c.segment;
    ref.gof = c.gof;
    if (!has_index(object, c.segment)) {
      ref.media_start = m.start_time + c.segment * m.segment_duration + offset;
      ref.media_end = ref.media_start + m.segment_duration;
      if (ref.media_end <= floor_tau + kTimeEps) {
        ++c.segment;
        c.gof = 0;
        continue;
      }
      return ref;
    }
    const SegmentIndex& idx = index(object, c.segment);
    if (c.gof >= static_cast<int>(idx.gofs.size())) {
      ++c.segment;
      c.gof = 0;
      continue;
    }
    const auto& gof = idx.gofs[static_cast<std::size_t>(c.gof)];
    ref.media_start = gof_start_seconds(object, gof) + offset;
    ref.media_end =
        ref.media_start + static_cast<double>(gof.duration) / m.timescale;
    if (ref.media_end <= floor_tau + kTimeEps) {
      ++c.gof;
      continue;
    }
    return ref;
  }
  return std::nullopt;
}

std::optional<GofRef> WindowedBuffer::next_gof(std::size_t object) const {
  return ref_at(object, cursors_.at(object));
}

double WindowedBuffer::next_release_time(double t, std::size_t object) const {
  if (window_.paused()) return kInf;
  const auto ref = next_gof(object);
  if (!ref) return kInf;
  return window_.user_time_at_trail(t, object, ref->media_start);
}

bool WindowedBuffer::gof_fully_received(std::size_t object, int segment,
                                        int gof) const {
  const auto& entry = index(object, segment).gofs.at(static_cast<std::size_t>(gof));
  for (const auto& tile : entry.tiles) {
    const TileKey key{static_cast<std::uint32_t>(object),
                      static_cast<std::uint32_t>(segment),
                      static_cast<std::uint32_t>(gof), tile.morton_code};
    if (store_.representation(key) <= 0) return false;
  }
  return true;
}

bool WindowedBuffer::gof_any_received(std::size_t object, int segment,
                                      int gof) const {
  const auto& entry = index(object, segment).gofs.at(static_cast<std::size_t>(gof));
  if (entry.tiles.empty()) return true;
  for (const auto& tile : entry.tiles) {
    const TileKey key{static_cast<std::uint32_t>(object),
                      static_cast<std::uint32_t>(segment),
                      static_cast<std::uint32_t>(gof), tile.morton_code};
    if (store_.representation(key) > 0) return true;
  }
  return false;
}

ReleaseOutcome WindowedBuffer::release_gof(std::size_t object, double t) {
  const auto ref = next_gof(object);
  if (!ref) throw RangeError("no GOF left to release");
  ReleaseOutcome out;
  out.gof = *ref;

  if (!has_index(object, ref->segment) ||
      !gof_any_received(object, ref->segment, ref->gof)) {
    out.stalled = true;
    if (!stalled_object_) {
      stalled_object_ = object;
      window_.pause(t);
      stalls_.push_back({t, -1.0});
    }
    return out;
  }

  const bool keep = window_.timeline(object).loop;
  const auto& entry =
      index(object, ref->segment).gofs.at(static_cast<std::size_t>(ref->gof));
  for (const auto& tile : entry.tiles) {
    const TileKey key{static_cast<std::uint32_t>(object),
                      static_cast<std::uint32_t>(ref->segment),
                      static_cast<std::uint32_t>(ref->gof), tile.morton_code};
    ReleasedTile r;
    r.key = key;
    r.n = store_.representation(key);
    r.media_time = ref->media_start;
    r.pass = ref->pass;
    r.released_at = t;
    r.normal_code = tile.normal_code;
    out.tiles.push_back(r);
    if (!keep) store_.erase(key);
  }
  Cursor& c = cursors_.at(object);
  c.pass = ref->pass;
  c.segment = ref->segment;
  c.gof = ref->gof + 1;
  return out;
}

std::vector<ReleaseOutcome> WindowedBuffer::release(double t) {
  std::vector<ReleaseOutcome> out;
  while (!stalled()) {
    // Earliest due GOF across objects.
    std::size_t best = object_count();
    double best_time = kInf;
    for (std::size_t o = 0; o < object_count(); ++o) {
      const auto ref = next_gof(o);
      if (!ref) continue;
      if (!(ref->media_start < window_.w_trail(t, o) - kTimeEps)) continue;
      const double due = window_.user_time_at_trail(t, o, ref->media_start);
      if (due < best_time) {
        best_time = due;
        best = o;
      }
    }
    if (best == object_count()) break;
    out.push_back(release_gof(best, t));
  }
  return out;
}

std::optional<ReleaseOutcome> WindowedBuffer::try_resume(double t) {
  if (!stalled_object_) return std::nullopt;
  const std::size_t object = *stalled_object_;
  const auto ref = next_gof(object);
  if (!ref || !has_index(object, ref->segment) ||
      !gof_any_received(object, ref->segment, ref->gof)) {
    return std::nullopt;
  }
  stalled_object_.reset();
  window_.resume(t);
  stalls_.back().end = t;
  return release_gof(object, t);
}

double WindowedBuffer::stalled_seconds(double t) const {
  double total = 0.0;
  for (const auto& s : stalls_) total += (s.end < 0.0 ? t : s.end) - s.start;
  return total;
}

double WindowedBuffer::contiguous_end(std::size_t object,
                                      double limit) const {
  const auto& o = window_.timeline(object);
  auto ref = next_gof(object);
  if (!ref) return o.clip_end;
  double end = ref->media_start;
  Cursor c{ref->pass, ref->segment, ref->gof};
  for (int guard = 0; guard < 1000000; ++guard) {
    const auto r = ref_at(object, c);
    if (!r || !has_index(object, r->segment)) break;
    if (!gof_fully_received(object, r->segment, r->gof)) break;
    end = r->media_end;
    if (end >= limit) break;
    c = Cursor{r->pass, r->segment, r->gof + 1};
  }
  return end;
}

double WindowedBuffer::occupancy(double t, std::size_t object) const {
  const auto& o = window_.timeline(object);
  if (!next_gof(object)) return 0.0;
  const WindowEdges e = window_.edges(t, object);
  // Looped objects keep entries from earlier passes; stop at the lead edge.
  const double limit = o.loop ? e.trail + e.span : o.clip_end;
  const double end = std::min(contiguous_end(object, limit), limit);
  return std::max(0.0, (end - e.trail) / o.speed);
}

double WindowedBuffer::occupancy(double t) const {
  double best = kInf;
  for (std::size_t o = 0; o < object_count(); ++o) {
    if (!next_gof(o)) continue;
    best = std::min(best, occupancy(t, o));
  }
  return std::isinf(best) ? 0.0 : best;
}

void WindowedBuffer::discard_outside_window(double t) {
  for (std::size_t o = 0; o < object_count(); ++o) {
    reset_cursor(o, window_.w_trail(t, o));
  }
  std::vector<TileKey> drop;
  for (const auto& [key, entry] : store_.entries()) {
    const std::size_t o = key.object;
    const WindowEdges e = window_.edges(t, o);
    bool inside = false;
    for (const auto& [pass, seg] : segments_in_window(t, o)) {
      if (static_cast<int>(key.segment) != seg || !has_index(o, seg)) continue;
      const auto& gof = index(o, seg).gofs.at(key.gof);
      const double start =
          gof_start_seconds(o, gof) +
          (window_.timeline(o).loop ? pass * window_.timeline(o).clip_length()
                                    : 0.0);
      if (start >= e.trail - kTimeEps && start < e.lead - kTimeEps) {
        inside = true;
        break;
      }
    }
    if (!inside) drop.push_back(key);
  }
  for (const auto& key : drop) store_.erase(key);
}

}  // namespace volu
