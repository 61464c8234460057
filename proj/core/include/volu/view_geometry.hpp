#pragma once

#include <cstdint>
#include <filesystem>
#include <numbers>
#include <vector>

#include "volu/media_model.hpp"

namespace volu {

struct Frustum {
  double horz_fov = std::numbers::pi / 2.0;  // radians
  double aspect = 16.0 / 9.0;
  double near = 0.01;  // meters
  double far = 100.0;  // meters

  // Vertical FOV is the horizontal FOV divided by the aspect ratio.
  double vert_fov() const { return horz_fov / aspect; }
};

struct Display {
  int horz_pixels = 1920;
};

struct Viewpoint {
  Vec3 position = Vec3::Zero();
  Vec3 forward = -Vec3::UnitZ();
  Vec3 up = Vec3::UnitY();
  Frustum frustum;
  Display display;

  // Throws ValidationError.
  void validate() const;

  // Viewpoint at `position` looking at `target`, with `up_hint` made
  // orthogonal to the viewing direction.
  static Viewpoint looking_at(const Vec3& position, const Vec3& target,
                              const Vec3& up_hint = Vec3::UnitY(),
                              Frustum frustum = {}, Display display = {});
};

// Center point inside the frustum (near/far depth, horizontal and vertical
// angular extent).
bool in_frustum(const Vec3& point, const Viewpoint& view);

// Frustum membership and the dominant normal facing the viewer.
bool is_visible(const Vec3& tile_pos, std::uint32_t normal_code,
                const Viewpoint& view);

struct LevelOfDetail {
  double rad = 0.0;  // radians across the tile
  double vpr = 0.0;  // voxels per radian
  double ppr = 0.0;  // display pixels per radian
  double lod = 0.0;  // distinguishable voxels in the tile's square area
};

// Throws DomainError when the viewer sits exactly on the tile center. A
// viewer closer than half a tile width is treated as being half a tile away.
LevelOfDetail distinguishable_voxels(const Representation& rep,
                                     const ObjectManifest& manifest,
                                     const Vec3& tile_pos,
                                     const Viewpoint& view);

// Same computation for an explicit viewer distance (already clamped).
LevelOfDetail distinguishable_voxels_at(const Representation& rep,
                                        const ObjectManifest& manifest,
                                        double dist, const Viewpoint& view);

// Camera samples in the CSV trace layout
// t,px,py,pz,fx,fy,fz,ux,uy,uz,horzFOV,horzPixels.
struct ViewpointSample {
  double t = 0.0;
  Viewpoint view;
};
std::vector<ViewpointSample> read_viewpoint_trace(
    const std::filesystem::path& path);
void write_viewpoint_trace(const std::filesystem::path& path,
                           const std::vector<ViewpointSample>& samples);

}  // namespace volu
