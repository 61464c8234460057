#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "volu/media_model.hpp"
#include "volu/tile_key.hpp"

namespace volu {

// Window length as a function of playback time since t0: grows linearly from
// `floor` to `cap` over `ramp_end` seconds, then stays at `cap`.
struct WindowConfig {
  double floor = 1.0;
  double cap = 5.0;
  double ramp_end = 4.0;

  void validate() const;
};

double window_size(double elapsed, const WindowConfig& config = {});

// Per-object position on the media timeline.
struct ObjectTimeline {
  double tau0 = 0.0;      // media time at t0
  double speed = 1.0;     // media seconds per user second
  double clip_start = 0.0;
  double clip_end = 0.0;  // media seconds
  bool loop = false;

  double clip_length() const { return clip_end - clip_start; }
};

// Trailing / leading edges for one object at one instant. `span` is
// v * window_size, before clamping to the clip end.
struct WindowEdges {
  double trail = 0.0;
  double lead = 0.0;
  double span = 0.0;
};

// The window over every object's media timeline. All objects share t0 and the
// window-size function. Stalls freeze playback time for every object at once.
class WindowState {
 public:
  WindowState() = default;
  WindowState(std::vector<ObjectTimeline> objects, WindowConfig config = {});

  std::size_t object_count() const { return objects_.size(); }
  const ObjectTimeline& timeline(std::size_t object) const;
  const WindowConfig& config() const { return config_; }

  void start(double t0) { t0_ = t0; started_ = true; }
  bool started() const { return started_; }
  double t0() const { return t0_; }

  // User seconds of playback since t0, excluding stalled time.
  double elapsed(double t) const;
  double window_size_at(double t) const;

  // Unclamped for looping objects; clamped to clip_end otherwise.
  double w_trail(double t, std::size_t object) const;
  double w_lead(double t, std::size_t object) const;
  WindowEdges edges(double t, std::size_t object) const;

  // User time at which the trailing edge of `object` reaches media time `tau`
  // if playback keeps running from `t`.
  double user_time_at_trail(double t, std::size_t object, double tau) const;

  void pause(double t);
  void resume(double t);
  bool paused() const { return paused_; }
  double paused_total() const { return paused_total_; }

  // Trick modes. Both keep the current window consistent at time t.
  void set_speed(double t, std::size_t object, double speed);
  void seek(double t, std::size_t object, double tau);

 private:
  std::vector<ObjectTimeline> objects_;
  WindowConfig config_;
  double t0_ = 0.0;
  bool started_ = false;
  bool paused_ = false;
  double pause_started_ = 0.0;
  double paused_total_ = 0.0;
};

struct BufferEntry {
  int n = 0;  // best representation received (0 = nothing)
  std::vector<double> utility;    // last computed U(m), m = 0..M
  std::vector<double> bit_count;  // last computed b(m), m = 0..M
  double received_at = -1.0;
};

// Maps tiles to the representation held in the buffer. Representations only
// ever increase while a tile stays in the store.
class BufferStore {
 public:
  const BufferEntry* find(const TileKey& key) const;
  BufferEntry& entry(const TileKey& key) { return entries_[key]; }
  int representation(const TileKey& key) const;

  // Returns true when `m` improved the stored representation.
  bool receive(const TileKey& key, int m, double t);
  void erase(const TileKey& key) { entries_.erase(key); }
  std::size_t size() const { return entries_.size(); }
  const std::map<TileKey, BufferEntry>& entries() const { return entries_; }

 private:
  std::map<TileKey, BufferEntry> entries_;
};

// One GOF on an object's unwrapped media timeline.
struct GofRef {
  std::uint32_t object = 0;
  int pass = 0;
  int segment = 0;  // 0-based position in the clip
  int gof = 0;      // position within the segment index
  double media_start = 0.0;  // unwrapped media seconds
  double media_end = 0.0;

  bool operator==(const GofRef&) const = default;
};

// A tile whose GOF lies inside the window.
struct WindowTile {
  TileKey key;
  double media_time = 0.0;  // unwrapped GOF start
  int pass = 0;
  std::size_t tile_pos = 0;  // position in the GOF's tile list
  std::uint32_t normal_code = 0;
  std::uint32_t frame_count = 0;
  std::size_t gof_tile_count = 0;
};

struct ReleasedTile {
  TileKey key;
  int n = 0;
  double media_time = 0.0;
  int pass = 0;
  double released_at = 0.0;
  std::uint32_t normal_code = 0;
};

struct ReleaseOutcome {
  GofRef gof;
  bool stalled = false;  // GOF had tiles but none received
  std::vector<ReleasedTile> tiles;
};

struct StallRecord {
  double start = 0.0;
  double end = -1.0;  // < 0 while ongoing
};

// Window plus buffer store plus the segment indexes fetched so far: the
// buffer "as a window" over every object.
class WindowedBuffer {
 public:
  WindowedBuffer() = default;
  WindowedBuffer(std::vector<ObjectManifest> manifests,
                 std::vector<ObjectTimeline> timelines, WindowConfig config);

  WindowState& window() { return window_; }
  const WindowState& window() const { return window_; }
  BufferStore& store() { return store_; }
  const BufferStore& store() const { return store_; }
  const ObjectManifest& manifest(std::size_t object) const;
  std::size_t object_count() const { return manifests_.size(); }

  // Segment index catalog.
  bool has_index(std::size_t object, int segment) const;
  const SegmentIndex& index(std::size_t object, int segment) const;
  void put_index(std::size_t object, int segment, SegmentIndex index);

  // Segments (0-based clip positions) overlapping [from, to] on the unwrapped
  // timeline, with the pass they belong to.
  std::vector<std::pair<int, int>> segments_covering(std::size_t object,
                                                     double from,
                                                     double to) const;
  std::vector<std::pair<int, int>> segments_in_window(double t,
                                                      std::size_t object) const;

  // Every occupied tile of every GOF with start in [w_trail, w_lead).
  // Throws MissingIndexError if a covering index has not been fetched, unless
  // `skip_missing` is set, in which case those segments are left out.
  std::vector<WindowTile> tiles_in_window(double t) const;
  std::vector<WindowTile> tiles_in_window(double t, std::size_t object,
                                          bool skip_missing = false) const;

  // Next GOF to be played for an object, or nullopt past the clip end.
  std::optional<GofRef> next_gof(std::size_t object) const;
  // User time the next GOF of `object` is due, +inf when none or paused.
  double next_release_time(double t, std::size_t object) const;

  // Plays one GOF: logs its tiles with their current representation and
  // removes them (looped objects keep them for later passes). An occupied GOF
  // with nothing received stalls playback instead and is retried by
  // `try_resume`.
  ReleaseOutcome release_gof(std::size_t object, double t);

  // Releases every GOF with start < w_trail(t), in time order.
  std::vector<ReleaseOutcome> release(double t);

  // Resumes a stalled playback once the blocking GOF has data.
  std::optional<ReleaseOutcome> try_resume(double t);
  bool stalled() const { return stalled_object_.has_value(); }
  const std::vector<StallRecord>& stalls() const { return stalls_; }
  double stalled_seconds(double t) const;

  // Contiguous span (user seconds) from the trailing edge over which every
  // tile holds a representation; minimum over objects.
  double occupancy(double t) const;
  double occupancy(double t, std::size_t object) const;

  // Media-time end of the contiguous fully-received run ahead of the trail,
  // scanning no further than `limit`.
  double contiguous_end(std::size_t object, double limit) const;

  // Drops store entries whose GOFs are no longer inside the window (seek).
  void discard_outside_window(double t);

  // Map an unwrapped media time to the clip position.
  double wrap(std::size_t object, double tau) const;
  int pass_of(std::size_t object, double tau) const;

 private:
  struct Cursor {
    int pass = 0;
    int segment = 0;
    int gof = 0;
  };

  double gof_start_seconds(std::size_t object, const GofIndexEntry& gof) const;
  bool gof_fully_received(std::size_t object, int segment, int gof) const;
  bool gof_any_received(std::size_t object, int segment, int gof) const;
  void advance_cursor(std::size_t object);
  std::optional<GofRef> ref_at(std::size_t object, const Cursor& c) const;
  void reset_cursor(std::size_t object, double tau);

  std::vector<ObjectManifest> manifests_;
  WindowState window_;
  BufferStore store_;
  std::vector<std::map<int, SegmentIndex>> indexes_;
  std::vector<Cursor> cursors_;
  std::optional<std::size_t> stalled_object_;
  std::vector<StallRecord> stalls_;
};

}  // namespace volu
