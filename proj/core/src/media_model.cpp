#include "volu/media_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "volu/errors.hpp"

namespace volu {

namespace {

constexpr std::array<char, 4> kIndexMagic = {'H', 'V', 'R', 'I'};
constexpr std::uint16_t kIndexVersion = 1;

bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

void replace_all(std::string& s, const std::string& key,
                 const std::string& value) {
  for (auto pos = s.find(key); pos != std::string::npos;
       pos = s.find(key, pos + value.size())) {
    s.replace(pos, key.size(), value);
  }
}

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  void u16(std::uint16_t v) {
    out_.push_back(static_cast<std::uint8_t>(v & 0xff));
    out_.push_back(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      out_.push_back(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
    }
  }
  void raw(std::span<const char> bytes) {
    for (char c : bytes) out_.push_back(static_cast<std::uint8_t>(c));
  }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint16_t u16(const char* field) {
    need(2, field);
    std::uint16_t v = static_cast<std::uint16_t>(bytes_[pos_] |
                                                 (bytes_[pos_ + 1] << 8));
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* field) {
    need(4, field);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* field) const {
    if (bytes_.size() - pos_ < n) {
      throw FormatError(std::string("truncated segment index reading ") + field,
                        pos_);
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

const Representation& ObjectManifest::representation(int m) const {
  if (m < 1 || m > representation_count()) {
    throw RangeError("representation index " + std::to_string(m) +
                     " outside 1.." + std::to_string(representation_count()));
  }
  return representations[static_cast<std::size_t>(m - 1)];
}

int ObjectManifest::tile_depth() const {
  if (tile_width <= 0 || max_width % tile_width != 0 ||
      !is_power_of_two(max_width / tile_width)) {
    throw ValidationError("tileWidth must divide maxWidth by a power of two");
  }
  int depth = 0;
  for (int ratio = max_width / tile_width; ratio > 1; ratio >>= 1) ++depth;
  return depth;
}

int ObjectManifest::segment_count() const {
  // Small tolerance so 60 / 1 does not become 61 through rounding noise.
  return static_cast<int>(std::ceil(duration / segment_duration - 1e-9));
}

void ObjectManifest::validate() const {
  if (max_width <= 0) throw ValidationError("maxWidth must be positive");
  if (tile_depth() > kMaxTileDepth) {
    throw ValidationError("tile depth exceeds " +
                          std::to_string(kMaxTileDepth));
  }
  if (!(segment_duration > 0.0)) {
    throw ValidationError("segmentDuration must be positive");
  }
  if (!(duration > 0.0)) throw ValidationError("duration must be positive");
  if (!(cube_to_object_scale > 0.0)) {
    throw ValidationError("cubeToObjectScale must be positive");
  }
  if (timescale == 0) throw ValidationError("timescale must be positive");
  if (!(max_frame_rate > 0.0)) {
    throw ValidationError("maxFrameRate must be positive");
  }
  if (std::abs(cube_to_object_rotation.norm() - 1.0) > 1e-6) {
    throw ValidationError("cubeToObjectRotation must be a unit quaternion");
  }
  if (representations.empty()) {
    throw ValidationError("manifest has no representations");
  }
  if (representations.size() > std::numeric_limits<std::uint16_t>::max()) {
    throw ValidationError("too many representations");
  }
  for (std::size_t i = 0; i < representations.size(); ++i) {
    const auto& r = representations[i];
    if (!(r.bandwidth > 0.0)) {
      throw ValidationError("representation bandwidth must be positive");
    }
    if (r.width <= 0 || r.width > max_width) {
      throw ValidationError("representation width outside (0, maxWidth]");
    }
    if (!(r.framerate > 0.0) || r.framerate > max_frame_rate) {
      throw ValidationError("representation framerate outside (0, maxFrameRate]");
    }
    if (i > 0) {
      const auto& prev = representations[i - 1];
      if (!(r.bandwidth > prev.bandwidth)) {
        throw ValidationError("bandwidth must strictly increase along the ladder");
      }
      if (r.width < prev.width) {
        throw ValidationError("width must not decrease along the ladder");
      }
    }
  }
}

std::string ObjectManifest::media_name(int m, int number) const {
  const Representation& rep = representation(m);
  std::string name = media_template;
  replace_all(name, "$bandwidth$", format_number(rep.bandwidth));
  replace_all(name, "$width$", std::to_string(rep.width));
  replace_all(name, "$framerate$", format_number(rep.framerate));
  replace_all(name, "$number$", std::to_string(number));
  return name;
}

std::vector<double> default_ladder_bps() {
  return {4e6, 8e6, 12e6, 16e6, 20e6};
}

ObjectManifest make_default_manifest(int tile_depth,
                                     std::span<const double> ladder_bps) {
  if (tile_depth < 0 || tile_depth > kMaxTileDepth) {
    throw RangeError("tile depth outside 0.." + std::to_string(kMaxTileDepth));
  }
  ObjectManifest m;
  m.max_width = 1024;
  m.tile_width = m.max_width >> tile_depth;
  m.cube_to_object_scale = 0.001;
  m.cube_to_object_translation = Vec3::Constant(-0.5 * m.cube_width_m());
  const std::size_t count = ladder_bps.size();
  for (std::size_t i = 0; i < count; ++i) {
    Representation r;
    r.bandwidth = ladder_bps[i];
    // Widths from max_width/4 up to max_width, linear in the rung index.
    const double frac =
        count > 1 ? static_cast<double>(i) / static_cast<double>(count - 1) : 1.0;
    r.width = static_cast<int>(std::lround(m.max_width * (0.25 + 0.75 * frac)));
    r.framerate = m.max_frame_rate;
    r.id = "r" + std::to_string(i + 1);
    m.representations.push_back(std::move(r));
  }
  m.validate();
  return m;
}

ObjectManifest make_default_manifest(int tile_depth) {
  const auto ladder = default_ladder_bps();
  return make_default_manifest(tile_depth, ladder);
}

// ---------------------------------------------------------------------------
// Morton

std::uint32_t morton_encode(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                            int tile_depth) {
  if (tile_depth < 0 || tile_depth > kMaxTileDepth) {
    throw RangeError("tile depth outside 0..10");
  }
  const std::uint32_t limit = 1u << tile_depth;
  if (x >= limit || y >= limit || z >= limit) {
    throw RangeError("tile coordinate outside [0, 2^depth)");
  }
  std::uint32_t code = 0;
  for (int b = 0; b < tile_depth; ++b) {
    code |= ((x >> b) & 1u) << (3 * b);
    code |= ((y >> b) & 1u) << (3 * b + 1);
    code |= ((z >> b) & 1u) << (3 * b + 2);
  }
  return code;
}

TileCoord morton_decode(std::uint32_t code, int tile_depth) {
  if (tile_depth < 0 || tile_depth > kMaxTileDepth) {
    throw RangeError("tile depth outside 0..10");
  }
  if (code >= (1u << (3 * tile_depth))) {
    throw RangeError("Morton code outside [0, 8^depth)");
  }
  TileCoord c;
  for (int b = 0; b < tile_depth; ++b) {
    c.x |= ((code >> (3 * b)) & 1u) << b;
    c.y |= ((code >> (3 * b + 1)) & 1u) << b;
    c.z |= ((code >> (3 * b + 2)) & 1u) << b;
  }
  return c;
}

Vec3 tile_cube_center(const ObjectManifest& manifest, std::uint32_t code) {
  const TileCoord c = morton_decode(code, manifest.tile_depth());
  const double w = manifest.tile_width_m();
  return Vec3((c.x + 0.5) * w, (c.y + 0.5) * w, (c.z + 0.5) * w);
}

Vec3 tile_world_position(const ObjectManifest& manifest, std::uint32_t code) {
  return manifest.cube_to_object_rotation * tile_cube_center(manifest, code) +
         manifest.cube_to_object_translation +
         manifest.object_to_world_translation;
}

Vec3 axis_vector(std::uint32_t normal_code) {
  switch (normal_code) {
    case 0: return Vec3::UnitX();
    case 1: return -Vec3::UnitX();
    case 2: return Vec3::UnitY();
    case 3: return -Vec3::UnitY();
    case 4: return Vec3::UnitZ();
    case 5: return -Vec3::UnitZ();
    default: throw RangeError("normal code outside 0..5");
  }
}

std::uint32_t dominant_axis_code(const Vec3& d) {
  // First strictly largest magnitude wins: x, then y, then z.
  int axis = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(d[i]) > std::abs(d[axis])) axis = i;
  }
  const bool negative = d[axis] < 0.0;
  return static_cast<std::uint32_t>(2 * axis + (negative ? 1 : 0));
}

// ---------------------------------------------------------------------------
// Index codec

void validate_index(const SegmentIndex& index) {
  const std::size_t reps = index.representation_count;
  for (std::size_t g = 0; g < index.gofs.size(); ++g) {
    const auto& gof = index.gofs[g];
    if (gof.per_representation.size() != reps) {
      throw ValidationError("GOF " + std::to_string(g) +
                            " has a per-representation table of wrong length");
    }
    for (std::size_t t = 0; t < gof.tiles.size(); ++t) {
      const auto& tile = gof.tiles[t];
      if (tile.byte_count.size() != reps) {
        throw ValidationError("tile byte-count array length differs from M");
      }
      if (tile.normal_code > 5) {
        throw ValidationError("normal code outside 0..5");
      }
      if (t > 0 && !(gof.tiles[t - 1].morton_code < tile.morton_code)) {
        throw ValidationError("tiles of GOF " + std::to_string(g) +
                              " are not in strictly increasing Morton order");
      }
    }
    if (g > 0) {
      const auto& prev = index.gofs[g - 1];
      if (static_cast<std::uint64_t>(prev.start_time) + prev.duration !=
          gof.start_time) {
        throw ValidationError("GOFs are not contiguous in media time");
      }
    }
  }
}

std::size_t serialized_size(const SegmentIndex& index) {
  const std::size_t reps = index.representation_count;
  std::size_t size = 12;
  for (const auto& gof : index.gofs) {
    const std::size_t tiles = gof.tiles.size();
    size += 16 + 8 * tiles + reps * (8 + 4 * tiles);
  }
  return size;
}

std::vector<std::uint8_t> serialize_index(const SegmentIndex& index) {
  validate_index(index);
  ByteWriter w(serialized_size(index));
  w.raw(kIndexMagic);
  w.u16(kIndexVersion);
  w.u16(index.representation_count);
  w.u32(static_cast<std::uint32_t>(index.gofs.size()));
  for (const auto& gof : index.gofs) {
    w.u32(gof.start_time);
    w.u32(gof.duration);
    w.u32(gof.frame_count);
    w.u32(static_cast<std::uint32_t>(gof.tiles.size()));
    for (const auto& tile : gof.tiles) {
      w.u32(tile.morton_code);
      w.u32(tile.normal_code);
    }
    for (std::size_t r = 0; r < index.representation_count; ++r) {
      w.u32(gof.per_representation[r].gof_byte_offset);
      w.u32(gof.per_representation[r].gof_header_byte_count);
      for (const auto& tile : gof.tiles) w.u32(tile.byte_count[r]);
    }
  }
  return w.take();
}

SegmentIndex parse_index(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw FormatError("truncated segment index magic", 0);
  for (std::size_t i = 0; i < 4; ++i) {
    if (bytes[i] != static_cast<std::uint8_t>(kIndexMagic[i])) {
      throw FormatError("bad segment index magic", i);
    }
  }
  ByteReader r(bytes.subspan(4));
  const auto at = [&] { return 4 + r.pos(); };

  const std::size_t version_pos = at();
  const std::uint16_t version = r.u16("version");
  if (version != kIndexVersion) {
    throw FormatError("unsupported segment index version " +
                          std::to_string(version),
                      version_pos);
  }
  SegmentIndex index;
  index.representation_count = r.u16("representationCount");
  const std::uint32_t gof_count = r.u32("gofCount");
  // Every GOF needs at least 16 bytes plus 8 per representation; reject
  // counts that cannot fit before allocating.
  const std::uint64_t min_gof_bytes = 16 + 8ull * index.representation_count;
  if (static_cast<std::uint64_t>(gof_count) * min_gof_bytes > r.remaining()) {
    throw FormatError("gofCount exceeds available bytes", at());
  }
  index.gofs.resize(gof_count);
  for (auto& gof : index.gofs) {
    gof.start_time = r.u32("GOF startTime");
    gof.duration = r.u32("GOF duration");
    gof.frame_count = r.u32("GOF frameCount");
    const std::size_t tile_count_pos = at();
    const std::uint32_t tile_count = r.u32("GOF tileCount");
    const std::uint64_t need =
        8ull * tile_count +
        index.representation_count * (8ull + 4ull * tile_count);
    if (need > r.remaining()) {
      throw FormatError("tileCount exceeds available bytes", tile_count_pos);
    }
    gof.tiles.resize(tile_count);
    for (auto& tile : gof.tiles) {
      tile.morton_code = r.u32("mortonCode");
      tile.normal_code = r.u32("normalCode");
      tile.byte_count.resize(index.representation_count);
    }
    gof.per_representation.resize(index.representation_count);
    for (std::size_t rep = 0; rep < index.representation_count; ++rep) {
      gof.per_representation[rep].gof_byte_offset = r.u32("gofByteOffset");
      gof.per_representation[rep].gof_header_byte_count =
          r.u32("gofHeaderByteCount");
      for (auto& tile : gof.tiles) tile.byte_count[rep] = r.u32("byteCount");
    }
  }
  if (r.remaining() != 0) {
    throw FormatError("trailing bytes after segment index", at());
  }
  validate_index(index);
  return index;
}

double index_bitrate(double tile_count, double representation_count,
                     double fps, double gof_frames) {
  if (!(gof_frames >= 1.0)) throw DomainError("gofFrames must be >= 1");
  return tile_count * (32.0 + representation_count * 32.0) * fps / gof_frames;
}

double tile_bit_count(const Representation& rep, std::uint32_t frame_count,
                      std::size_t tile_count) {
  if (tile_count == 0) {
    throw DomainError("tile_bit_count is undefined for an empty GOF");
  }
  return rep.bandwidth / rep.framerate * frame_count /
         static_cast<double>(tile_count);
}

double tile_bit_count(const Representation& rep, const GofIndexEntry& gof) {
  return tile_bit_count(rep, gof.frame_count, gof.tiles.size());
}

ByteRange gof_header_range(const GofIndexEntry& gof, int m) {
  if (m < 1 || static_cast<std::size_t>(m) > gof.per_representation.size()) {
    throw RangeError("representation index outside 1..M");
  }
  const auto& entry = gof.per_representation[static_cast<std::size_t>(m - 1)];
  return {entry.gof_byte_offset, entry.gof_header_byte_count};
}

ByteRange tile_byte_range(const GofIndexEntry& gof, std::size_t tile_pos,
                          int m) {
  const ByteRange header = gof_header_range(gof, m);
  if (tile_pos >= gof.tiles.size()) throw RangeError("tile position out of range");
  const auto rep = static_cast<std::size_t>(m - 1);
  std::uint64_t offset = header.offset + header.length;
  for (std::size_t t = 0; t < tile_pos; ++t) {
    offset += gof.tiles[t].byte_count[rep];
  }
  return {offset, gof.tiles[tile_pos].byte_count[rep]};
}

// ---------------------------------------------------------------------------
// Synthetic content

std::vector<OccupiedTile> shell_occupancy(const ShellSpec& shell,
                                          const ObjectManifest& manifest) {
  std::vector<OccupiedTile> tiles;
  if (!(shell.radius > 0.0)) return tiles;
  const int depth = manifest.tile_depth();
  const std::uint32_t per_axis = 1u << depth;
  const double w = manifest.tile_width_m();
  const double outer = shell.radius + 0.5 * shell.thickness;
  const double inner = std::max(0.0, shell.radius - 0.5 * shell.thickness);

  const std::uint32_t cells = per_axis * per_axis * per_axis;
  for (std::uint32_t code = 0; code < cells; ++code) {
    const TileCoord c = morton_decode(code, depth);
    const Vec3 lo(c.x * w, c.y * w, c.z * w);
    const Vec3 hi = lo + Vec3::Constant(w);
    double near_sq = 0.0;
    double far_sq = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double p = shell.center[i];
      const double near = p < lo[i] ? lo[i] - p : (p > hi[i] ? p - hi[i] : 0.0);
      const double far = std::max(std::abs(p - lo[i]), std::abs(p - hi[i]));
      near_sq += near * near;
      far_sq += far * far;
    }
    if (std::sqrt(near_sq) <= outer && std::sqrt(far_sq) >= inner) {
      const Vec3 center = lo + Vec3::Constant(0.5 * w);
      const Vec3 radial = center - shell.center;
      const std::uint32_t normal =
          radial.norm() > 1e-12 ? dominant_axis_code(radial) : 0u;
      tiles.push_back({code, normal});
    }
  }
  return tiles;  // already ascending: codes were visited in order
}

std::vector<GofSlot> segment_gof_layout(const ObjectManifest& manifest,
                                        int segment, int gof_frames) {
  if (gof_frames < 1) throw DomainError("gof_frames must be >= 1");
  if (segment < 0 || segment >= manifest.segment_count()) {
    throw RangeError("segment " + std::to_string(segment) + " outside clip");
  }
  const double fps = manifest.max_frame_rate;
  const double seg_start = manifest.start_time + segment * manifest.segment_duration;
  const double seg_end = std::min(manifest.start_time + manifest.duration,
                                  seg_start + manifest.segment_duration);
  const auto frames = static_cast<std::uint32_t>(
      std::lround((seg_end - seg_start) * fps));
  const auto ticks_at = [&](std::uint32_t frame) {
    return static_cast<std::uint32_t>(
        std::llround((seg_start + frame / fps) * manifest.timescale));
  };
  std::vector<GofSlot> slots;
  for (std::uint32_t f = 0; f < frames; f += static_cast<std::uint32_t>(gof_frames)) {
    const std::uint32_t count =
        std::min<std::uint32_t>(static_cast<std::uint32_t>(gof_frames), frames - f);
    GofSlot slot;
    slot.start_time = ticks_at(f);
    slot.duration = ticks_at(f + count) - slot.start_time;
    slot.frame_count = count;
    slots.push_back(slot);
  }
  return slots;
}

GofIndexEntry make_gof_entry(const ObjectManifest& manifest, const GofSlot& slot,
                             std::span<const OccupiedTile> tiles) {
  GofIndexEntry gof;
  gof.start_time = slot.start_time;
  gof.duration = slot.duration;
  gof.frame_count = slot.frame_count;
  const int reps = manifest.representation_count();
  gof.tiles.reserve(tiles.size());
  for (const auto& t : tiles) {
    TileIndexEntry entry;
    entry.morton_code = t.morton_code;
    entry.normal_code = t.normal_code;
    entry.byte_count.resize(static_cast<std::size_t>(reps), 0);
    gof.tiles.push_back(std::move(entry));
  }
  if (!tiles.empty()) {
    for (int m = 1; m <= reps; ++m) {
      const double bits =
          tile_bit_count(manifest.representation(m), slot.frame_count, tiles.size());
      const auto bytes = static_cast<std::uint32_t>(std::ceil(bits / 8.0));
      for (auto& entry : gof.tiles) {
        entry.byte_count[static_cast<std::size_t>(m - 1)] = bytes;
      }
    }
  }
  gof.per_representation.resize(static_cast<std::size_t>(reps));
  return gof;
}

namespace {

// Lays GOFs back to back inside each representation's payload.
void assign_payload_offsets(SegmentIndex& index) {
  for (std::size_t r = 0; r < index.representation_count; ++r) {
    std::uint32_t offset = 0;
    for (auto& gof : index.gofs) {
      gof.per_representation[r].gof_byte_offset = offset;
      gof.per_representation[r].gof_header_byte_count = kGofHeaderBytes;
      offset += kGofHeaderBytes;
      for (const auto& tile : gof.tiles) offset += tile.byte_count[r];
    }
  }
}

}  // namespace

std::vector<GofIndexEntry> synth_object(const ShellSpec& shell,
                                        const ObjectManifest& manifest,
                                        int gof_count, int gof_frames) {
  const auto occupied = shell_occupancy(shell, manifest);
  std::vector<GofIndexEntry> gofs;
  for (int seg = 0; seg < manifest.segment_count() &&
                    static_cast<int>(gofs.size()) < gof_count;
       ++seg) {
    SegmentIndex index;
    index.representation_count =
        static_cast<std::uint16_t>(manifest.representation_count());
    for (const auto& slot : segment_gof_layout(manifest, seg, gof_frames)) {
      index.gofs.push_back(make_gof_entry(manifest, slot, occupied));
    }
    assign_payload_offsets(index);
    for (auto& gof : index.gofs) {
      if (static_cast<int>(gofs.size()) == gof_count) break;
      gofs.push_back(std::move(gof));
    }
  }
  return gofs;
}

SyntheticObject::SyntheticObject(ObjectManifest manifest, ShellSpec shell,
                                 int gof_frames)
    : manifest_(std::move(manifest)), shell_(shell), gof_frames_(gof_frames) {
  manifest_.validate();
  if (gof_frames_ < 1) throw ValidationError("gof_frames must be >= 1");
  occupancy_ = shell_occupancy(shell_, manifest_);
}

SegmentIndex SyntheticObject::segment_index(int segment) const {
  SegmentIndex index;
  index.representation_count =
      static_cast<std::uint16_t>(manifest_.representation_count());
  for (const auto& slot : segment_gof_layout(manifest_, segment, gof_frames_)) {
    index.gofs.push_back(make_gof_entry(manifest_, slot, occupancy_));
  }
  assign_payload_offsets(index);
  return index;
}

std::vector<std::uint8_t> SyntheticObject::index_bytes(int segment) const {
  return serialize_index(segment_index(segment));
}

std::size_t SyntheticObject::index_byte_size(int segment) const {
  return serialized_size(segment_index(segment));
}

std::size_t SyntheticObject::payload_size(int segment, int m) const {
  const SegmentIndex index = segment_index(segment);
  std::size_t size = 0;
  for (const auto& gof : index.gofs) {
    const ByteRange header = gof_header_range(gof, m);
    size = header.offset + header.length;
    for (const auto& tile : gof.tiles) {
      size += tile.byte_count[static_cast<std::size_t>(m - 1)];
    }
  }
  return size;
}

std::vector<std::uint8_t> SyntheticObject::payload(int segment, int m) const {
  const SegmentIndex index = segment_index(segment);
  std::vector<std::uint8_t> bytes(payload_size(segment, m), 0);
  for (std::size_t g = 0; g < index.gofs.size(); ++g) {
    const auto& gof = index.gofs[g];
    const ByteRange header = gof_header_range(gof, m);
    // GOF header: frame count and tile count, rest zero.
    bytes[header.offset] = static_cast<std::uint8_t>(gof.frame_count);
    bytes[header.offset + 1] = static_cast<std::uint8_t>(gof.tiles.size() & 0xff);
    bytes[header.offset + 2] = static_cast<std::uint8_t>(gof.tiles.size() >> 8);
    for (std::size_t t = 0; t < gof.tiles.size(); ++t) {
      const ByteRange range = tile_byte_range(gof, t, m);
      const auto fill = static_cast<std::uint8_t>(
          (gof.tiles[t].morton_code * 31u + static_cast<std::uint32_t>(m) * 7u +
           static_cast<std::uint32_t>(g)) & 0xff);
      std::fill_n(bytes.begin() + static_cast<std::ptrdiff_t>(range.offset),
                  range.length, fill);
    }
  }
  return bytes;
}

}  // namespace volu
