#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace volu {

using Vec3 = Eigen::Vector3d;

// One rung of an object's bitrate / level-of-detail ladder.
struct Representation {
  std::string id;
  double bandwidth = 0.0;  // bits per second
  int width = 0;           // voxels across the bounding cube
  double framerate = 0.0;  // frames per second

  bool operator==(const Representation&) const = default;
};

// Static description of one volumetric object. Representation indices used
// throughout the library are 1-based (m = 1..M); m = 0 is the null
// representation.
struct ObjectManifest {
  int max_width = 1024;
  double max_frame_rate = 30.0;
  double cube_to_object_scale = 0.001;  // meters per voxel
  Vec3 cube_to_object_translation = Vec3::Zero();
  Eigen::Quaterniond cube_to_object_rotation = Eigen::Quaterniond::Identity();
  Vec3 object_to_world_translation = Vec3::Zero();
  int tile_width = 1024;
  double start_time = 0.0;        // media seconds
  double duration = 60.0;         // media seconds
  double segment_duration = 1.0;  // media seconds
  int start_number = 0;
  std::uint32_t timescale = 90000;
  std::string media_template =
      "Object_$bandwidth$_$width$_$framerate$_$number$.hvr";
  std::vector<Representation> representations;

  int representation_count() const {
    return static_cast<int>(representations.size());
  }
  const Representation& representation(int m) const;  // 1-based
  int tile_depth() const;
  int segment_count() const;
  double cube_width_m() const { return max_width * cube_to_object_scale; }
  double tile_width_m() const { return tile_width * cube_to_object_scale; }

  // Throws ValidationError when an invariant of the ladder or geometry fails.
  void validate() const;

  // Expands $bandwidth$, $width$, $framerate$ and $number$ in the template.
  std::string media_name(int m, int number) const;
};

// Ladder used by the experiments: 4, 8, 12, 16, 20 Mbps.
std::vector<double> default_ladder_bps();

// Builds a centered 1.024 m cube manifest with the given ladder and tiling
// depth. Widths grow with the rung index up to max_width.
ObjectManifest make_default_manifest(int tile_depth,
                                     std::span<const double> ladder_bps);
ObjectManifest make_default_manifest(int tile_depth);

// ---------------------------------------------------------------------------
// Morton (Z-order) tile addressing.

inline constexpr int kMaxTileDepth = 10;

struct TileCoord {
  std::uint32_t x = 0;
  std::uint32_t y = 0;
  std::uint32_t z = 0;
  bool operator==(const TileCoord&) const = default;
};

// x occupies bit 3b, y bit 3b+1, z bit 3b+2 for level b.
std::uint32_t morton_encode(std::uint32_t x, std::uint32_t y, std::uint32_t z,
                            int tile_depth = kMaxTileDepth);
TileCoord morton_decode(std::uint32_t code, int tile_depth = kMaxTileDepth);

// World-space center of the tile cell addressed by `code`.
Vec3 tile_world_position(const ObjectManifest& manifest, std::uint32_t code);

// Center of the tile cell in cube-local meters (origin at the cube corner).
Vec3 tile_cube_center(const ObjectManifest& manifest, std::uint32_t code);

// Unit vector of a dominant-normal code: 0..5 = +x, -x, +y, -y, +z, -z.
Vec3 axis_vector(std::uint32_t normal_code);
std::uint32_t dominant_axis_code(const Vec3& direction);

// ---------------------------------------------------------------------------
// Segment index.

struct TileIndexEntry {
  std::uint32_t morton_code = 0;
  std::uint32_t normal_code = 0;
  std::vector<std::uint32_t> byte_count;  // one per representation

  bool operator==(const TileIndexEntry&) const = default;
};

struct GofRepresentationEntry {
  std::uint32_t gof_byte_offset = 0;  // within the segment payload
  std::uint32_t gof_header_byte_count = 0;

  bool operator==(const GofRepresentationEntry&) const = default;
};

struct GofIndexEntry {
  std::uint32_t start_time = 0;  // ticks
  std::uint32_t duration = 0;    // ticks
  std::uint32_t frame_count = 0;
  std::vector<TileIndexEntry> tiles;  // ascending Morton order
  std::vector<GofRepresentationEntry> per_representation;

  std::size_t tile_count() const { return tiles.size(); }
  bool operator==(const GofIndexEntry&) const = default;
};

struct SegmentIndex {
  std::uint16_t representation_count = 0;
  std::vector<GofIndexEntry> gofs;

  std::size_t gof_count() const { return gofs.size(); }
  bool operator==(const SegmentIndex&) const = default;
};

// Checks Morton ordering, per-representation array lengths and GOF
// contiguity. Throws ValidationError.
void validate_index(const SegmentIndex& index);

// Closed-form size of the binary encoding.
std::size_t serialized_size(const SegmentIndex& index);

std::vector<std::uint8_t> serialize_index(const SegmentIndex& index);

// Throws FormatError for truncated or garbled input and ValidationError when
// the decoded index breaks an invariant.
SegmentIndex parse_index(std::span<const std::uint8_t> bytes);

// Bits per second spent on segment indexes for a given tile density.
double index_bitrate(double tile_count, double representation_count,
                     double fps, double gof_frames);

// Equal split of a GOF's bit budget across its occupied tiles.
double tile_bit_count(const Representation& rep, std::uint32_t frame_count,
                      std::size_t tile_count);
double tile_bit_count(const Representation& rep, const GofIndexEntry& gof);

struct ByteRange {
  std::uint64_t offset = 0;
  std::uint64_t length = 0;
  bool operator==(const ByteRange&) const = default;
};

// Byte range of tile `tile_pos` (position in gof.tiles) inside the payload of
// representation m (1-based).
ByteRange tile_byte_range(const GofIndexEntry& gof, std::size_t tile_pos,
                          int m);
ByteRange gof_header_range(const GofIndexEntry& gof, int m);

// ---------------------------------------------------------------------------
// Synthetic content.

// Spherical shell in cube-local meters (origin at the cube corner).
struct ShellSpec {
  Vec3 center = Vec3::Constant(0.512);
  double radius = 0.45;
  double thickness = 0.02;
};

struct OccupiedTile {
  std::uint32_t morton_code = 0;
  std::uint32_t normal_code = 0;
  bool operator==(const OccupiedTile&) const = default;
};

inline constexpr std::uint32_t kGofHeaderBytes = 16;
inline constexpr int kDefaultGofFrames = 4;

// Occupied tiles of one GOF for a shell, ascending Morton order.
std::vector<OccupiedTile> shell_occupancy(const ShellSpec& shell,
                                          const ObjectManifest& manifest);

// Frame layout of a segment: GOFs of `gof_frames` frames, the last one
// possibly shorter. `segment` is 0-based relative to start_number.
struct GofSlot {
  std::uint32_t start_time = 0;  // ticks
  std::uint32_t duration = 0;    // ticks
  std::uint32_t frame_count = 0;
};
std::vector<GofSlot> segment_gof_layout(const ObjectManifest& manifest,
                                        int segment, int gof_frames);

// Fills tile byte counts and payload offsets for a GOF.
GofIndexEntry make_gof_entry(const ObjectManifest& manifest, const GofSlot& slot,
                             std::span<const OccupiedTile> tiles);

// The first `gof_count` GOFs of the object's timeline, each with its occupied
// tiles, normal codes and byte counts.
std::vector<GofIndexEntry> synth_object(const ShellSpec& shell,
                                        const ObjectManifest& manifest,
                                        int gof_count,
                                        int gof_frames = kDefaultGofFrames);

// Server-side view of one synthetic object: manifest, per-segment indexes and
// opaque payloads consistent with them.
class SyntheticObject {
 public:
  SyntheticObject(ObjectManifest manifest, ShellSpec shell,
                  int gof_frames = kDefaultGofFrames);

  const ObjectManifest& manifest() const { return manifest_; }
  const ShellSpec& shell() const { return shell_; }
  int gof_frames() const { return gof_frames_; }
  int segment_count() const { return manifest_.segment_count(); }
  const std::vector<OccupiedTile>& occupancy() const { return occupancy_; }

  // `segment` is 0-based relative to start_number.
  SegmentIndex segment_index(int segment) const;
  std::vector<std::uint8_t> index_bytes(int segment) const;
  std::size_t index_byte_size(int segment) const;
  std::size_t payload_size(int segment, int m) const;
  // Deterministic filler bytes; layout matches segment_index(segment).
  std::vector<std::uint8_t> payload(int segment, int m) const;

 private:
  ObjectManifest manifest_;
  ShellSpec shell_;
  int gof_frames_;
  std::vector<OccupiedTile> occupancy_;
};

}  // namespace volu
