#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "volu/media_model.hpp"
#include "volu/view_geometry.hpp"

namespace volu {

enum class CameraKind {
  kStatic,  // fixed viewpoint, optionally flipped to the opposite side
  kPath1,   // zoom in and out along a line toward the target
  kPath2,   // circular orbit around the target
  kPan,     // fixed position, yaw rotating at a constant rate
  kTrace,   // recorded samples, held until the next sample
};

CameraKind parse_camera_kind(const std::string& name);  // throws ConfigError
std::string to_string(CameraKind kind);

struct CameraSpec {
  CameraKind kind = CameraKind::kStatic;
  Vec3 target = Vec3::Zero();
  // Unit direction from the target toward the camera (static and path 1).
  Vec3 direction = Vec3(1.0, 0.5, 0.8).normalized();
  double distance = 2.0;       // static
  std::vector<double> flip_times;  // static: jump to the mirrored position
  double far_distance = 5.0;   // path 1
  double near_distance = 0.5;  // path 1
  double period = 20.0;        // path 1, seconds per far-near-far cycle
  double radius = 2.0;         // path 2
  double height = 0.0;         // path 2, offset along +y
  double angular_speed = 2.0 * std::numbers::pi / 20.0;  // path 2, pan
  double speed = 1.0;          // time multiplier for every moving path
  Vec3 pan_position = Vec3::Zero();
  double pan_start_yaw = 0.0;  // radians, 0 looks along +x
  std::vector<ViewpointSample> trace;
  Frustum frustum;
  Display display;

  void validate() const;
};

class CameraPath {
 public:
  CameraPath() = default;
  explicit CameraPath(CameraSpec spec);

  const CameraSpec& spec() const { return spec_; }
  Viewpoint at(double t) const;

 private:
  CameraSpec spec_;
};

// Distance from the target on path 1 at time t: a triangle wave between the
// far and near distances.
double path1_distance(const CameraSpec& spec, double t);

}  // namespace volu
