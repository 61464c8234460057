#include "volu/view_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "volu/errors.hpp"

namespace volu {

namespace {

// ceil() that ignores floating-point noise just above an integer, so that
// 0.2 * 160 counts as 32 rather than 33.
double tolerant_ceil(double x) {
  const double snapped = std::round(x);
  if (std::abs(x - snapped) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return snapped;
  }
  return std::ceil(x);
}

}  // namespace

void Viewpoint::validate() const {
  if (!(frustum.horz_fov > 0.0 && frustum.horz_fov < std::numbers::pi)) {
    throw ValidationError("horzFOV must lie in (0, pi)");
  }
  if (!(frustum.near < frustum.far) || frustum.near < 0.0) {
    throw ValidationError("frustum needs 0 <= near < far");
  }
  if (!(frustum.aspect > 0.0)) throw ValidationError("aspect must be positive");
  if (std::abs(forward.norm() - 1.0) > 1e-6 || std::abs(up.norm() - 1.0) > 1e-6) {
    throw ValidationError("forward and up must be unit vectors");
  }
  if (std::abs(forward.dot(up)) > 1e-6) {
    throw ValidationError("forward and up must be orthogonal");
  }
  if (display.horz_pixels <= 0) {
    throw ValidationError("display.horzPixels must be positive");
  }
}

Viewpoint Viewpoint::looking_at(const Vec3& position, const Vec3& target,
                                const Vec3& up_hint, Frustum frustum,
                                Display display) {
  Viewpoint v;
  v.position = position;
  v.forward = (target - position).normalized();
  Vec3 up = up_hint - up_hint.dot(v.forward) * v.forward;
  if (up.norm() < 1e-9) {
    // Looking along the hint; any perpendicular will do.
    up = v.forward.unitOrthogonal();
  }
  v.up = up.normalized();
  v.frustum = frustum;
  v.display = display;
  return v;
}

bool in_frustum(const Vec3& point, const Viewpoint& view) {
  const Vec3 d = point - view.position;
  const double depth = d.dot(view.forward);
  if (depth < view.frustum.near || depth > view.frustum.far) return false;
  const Vec3 right = view.forward.cross(view.up);
  const double x = d.dot(right);
  const double y = d.dot(view.up);
  const double half_h = std::tan(0.5 * view.frustum.horz_fov);
  const double half_v = std::tan(0.5 * view.frustum.vert_fov());
  return std::abs(x) <= depth * half_h && std::abs(y) <= depth * half_v;
}

bool is_visible(const Vec3& tile_pos, std::uint32_t normal_code,
                const Viewpoint& view) {
  if (!in_frustum(tile_pos, view)) return false;
  return (view.position - tile_pos).dot(axis_vector(normal_code)) > 0.0;
}

LevelOfDetail distinguishable_voxels_at(const Representation& rep,
                                        const ObjectManifest& manifest,
                                        double dist, const Viewpoint& view) {
  if (!(dist > 0.0)) throw DomainError("viewer distance must be positive");
  LevelOfDetail out;
  out.rad = manifest.tile_width_m() / dist;
  out.vpr = rep.width * dist / manifest.cube_width_m();
  out.ppr = view.display.horz_pixels / view.frustum.horz_fov;
  const double across = out.rad * std::min(out.vpr, out.ppr);
  const double side = tolerant_ceil(across);
  out.lod = across > 0.0 ? std::max(1.0, side * side) : 0.0;
  return out;
}

LevelOfDetail distinguishable_voxels(const Representation& rep,
                                     const ObjectManifest& manifest,
                                     const Vec3& tile_pos,
                                     const Viewpoint& view) {
  const double dist = (tile_pos - view.position).norm();
  if (dist == 0.0) {
    throw DomainError("viewer is at the tile center");
  }
  return distinguishable_voxels_at(
      rep, manifest, std::max(dist, 0.5 * manifest.tile_width_m()), view);
}

std::vector<ViewpointSample> read_viewpoint_trace(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open viewpoint trace " + path.string());
  std::vector<ViewpointSample> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line_no == 1 && line.find_first_of("abcdefghijklmnopqrstuvwxyz") !=
                            std::string::npos) {
      continue;  // header row
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    ViewpointSample s;
    double px, py, pz, fx, fy, fz, ux, uy, uz, fov, pixels;
    if (!(row >> s.t >> px >> py >> pz >> fx >> fy >> fz >> ux >> uy >> uz >>
          fov >> pixels)) {
      throw ConfigError("malformed viewpoint trace row " +
                        std::to_string(line_no));
    }
    s.view.position = Vec3(px, py, pz);
    s.view.forward = Vec3(fx, fy, fz).normalized();
    Vec3 up(ux, uy, uz);
    up -= up.dot(s.view.forward) * s.view.forward;
    s.view.up = up.normalized();
    s.view.frustum.horz_fov = fov;
    s.view.display.horz_pixels = static_cast<int>(pixels);
    s.view.validate();
    if (!samples.empty() && s.t < samples.back().t) {
      throw ConfigError("viewpoint trace times must be non-decreasing");
    }
    samples.push_back(s);
  }
  if (samples.empty()) throw ConfigError("viewpoint trace is empty");
  return samples;
}

void write_viewpoint_trace(const std::filesystem::path& path,
                           const std::vector<ViewpointSample>& samples) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write viewpoint trace " + path.string());
  out << "t,px,py,pz,fx,fy,fz,ux,uy,uz,horzFOV,horzPixels\n";
  out.precision(12);
  for (const auto& s : samples) {
    const auto& v = s.view;
    out << s.t << ',' << v.position.x() << ',' << v.position.y() << ','
        << v.position.z() << ',' << v.forward.x() << ',' << v.forward.y() << ','
        << v.forward.z() << ',' << v.up.x() << ',' << v.up.y() << ','
        << v.up.z() << ',' << v.frustum.horz_fov << ','
        << v.display.horz_pixels << '\n';
  }
}

}  // namespace volu
