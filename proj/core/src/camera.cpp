#include "volu/camera.hpp"

#include <algorithm>
#include <cmath>

#include "volu/errors.hpp"

namespace volu {

CameraKind parse_camera_kind(const std::string& name) {
  if (name == "static") return CameraKind::kStatic;
  if (name == "path1") return CameraKind::kPath1;
  if (name == "path2") return CameraKind::kPath2;
  if (name == "pan") return CameraKind::kPan;
  if (name == "trace") return CameraKind::kTrace;
  throw ConfigError("unknown camera '" + name + "'");
}

std::string to_string(CameraKind kind) {
  switch (kind) {
    case CameraKind::kStatic: return "static";
    case CameraKind::kPath1: return "path1";
    case CameraKind::kPath2: return "path2";
    case CameraKind::kPan: return "pan";
    case CameraKind::kTrace: return "trace";
  }
  return "static";
}

void CameraSpec::validate() const {
  if (!(direction.norm() > 0.0)) throw ValidationError("camera direction is zero");
  if (!(distance > 0.0)) throw ValidationError("camera distance must be > 0");
  if (!(near_distance > 0.0) || near_distance > far_distance) {
    throw ValidationError("path 1 needs 0 < near <= far");
  }
  if (!(period > 0.0)) throw ValidationError("path 1 period must be > 0");
  if (!(radius > 0.0)) throw ValidationError("orbit radius must be > 0");
  if (!(speed > 0.0)) throw ValidationError("camera speed must be > 0");
  if (kind == CameraKind::kTrace && trace.empty()) {
    throw ValidationError("camera trace is empty");
  }
}

double path1_distance(const CameraSpec& spec, double t) {
  const double phase = t * spec.speed / spec.period;
  const double frac = phase - std::floor(phase);
  const double tri = 1.0 - std::abs(1.0 - 2.0 * frac);  // 0 -> 1 -> 0
  return spec.far_distance + (spec.near_distance - spec.far_distance) * tri;
}

CameraPath::CameraPath(CameraSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  spec_.direction.normalize();
  std::sort(spec_.flip_times.begin(), spec_.flip_times.end());
  std::stable_sort(spec_.trace.begin(), spec_.trace.end(),
                   [](const ViewpointSample& a, const ViewpointSample& b) {
                     return a.t < b.t;
                   });
}

Viewpoint CameraPath::at(double t) const {
  const auto& s = spec_;
  switch (s.kind) {
    case CameraKind::kStatic: {
      const auto flips = std::upper_bound(s.flip_times.begin(),
                                          s.flip_times.end(), t) -
                         s.flip_times.begin();
      const double sign = flips % 2 == 0 ? 1.0 : -1.0;
      return Viewpoint::looking_at(s.target + sign * s.distance * s.direction,
                                   s.target, Vec3::UnitY(), s.frustum,
                                   s.display);
    }
    case CameraKind::kPath1:
      return Viewpoint::looking_at(
          s.target + path1_distance(s, t) * s.direction, s.target,
          Vec3::UnitY(), s.frustum, s.display);
    case CameraKind::kPath2: {
      const double a = s.angular_speed * s.speed * t;
      const Vec3 offset(s.radius * std::cos(a), s.height, s.radius * std::sin(a));
      return Viewpoint::looking_at(s.target + offset, s.target, Vec3::UnitY(),
                                   s.frustum, s.display);
    }
    case CameraKind::kPan: {
      const double yaw = s.pan_start_yaw + s.angular_speed * s.speed * t;
      const Vec3 look(std::cos(yaw), 0.0, std::sin(yaw));
      return Viewpoint::looking_at(s.pan_position, s.pan_position + look,
                                   Vec3::UnitY(), s.frustum, s.display);
    }
    case CameraKind::kTrace: {
      auto it = std::upper_bound(
          s.trace.begin(), s.trace.end(), t,
          [](double v, const ViewpointSample& x) { return v < x.t; });
      if (it != s.trace.begin()) --it;
      return it->view;
    }
  }
  return {};
}

}  // namespace volu
