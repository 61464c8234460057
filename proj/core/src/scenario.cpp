#include "volu/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "volu/errors.hpp"
#include "volu/manifest_io.hpp"

namespace volu {
namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& base,
                              const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative() && !base.empty()) return base / path;
  return path;
}

Vec3 read_vec3(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(std::string(what) + " must be an array of 3 numbers");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

ObjectSpec parse_object(const json& j, const std::filesystem::path& base) {
  ObjectSpec o;
  if (j.contains("manifest")) o.manifest = resolve(base, j.at("manifest").get<std::string>());
  if (j.contains("position")) o.position = read_vec3(j.at("position"), "position");
  read(j, "tau0", o.tau0);
  read(j, "speed", o.speed);
  read(j, "loop", o.loop);
  read(j, "ladder", o.ladder);
  read(j, "clipDuration", o.clip_duration);
  read(j, "gofFrames", o.gof_frames);
  if (j.contains("shell")) {
    const auto& s = j.at("shell");
    if (s.contains("center")) o.shell.center = read_vec3(s.at("center"), "shell.center");
    read(s, "radius", o.shell.radius);
    read(s, "thickness", o.shell.thickness);
  }
  return o;
}

void parse_camera(const json& j, const std::filesystem::path& base,
                  CameraSpec& c) {
  if (j.is_string()) {
    const auto name = j.get<std::string>();
    if (name.rfind("trace:", 0) == 0) {
      c.kind = CameraKind::kTrace;
      c.trace = read_viewpoint_trace(resolve(base, name.substr(6)));
    } else {
      c.kind = parse_camera_kind(name);
    }
    return;
  }
  if (j.contains("kind")) parse_camera(j.at("kind"), base, c);
  if (j.contains("trace")) {
    c.kind = CameraKind::kTrace;
    c.trace = read_viewpoint_trace(resolve(base, j.at("trace").get<std::string>()));
  }
  if (j.contains("target")) c.target = read_vec3(j.at("target"), "camera.target");
  if (j.contains("direction")) c.direction = read_vec3(j.at("direction"), "camera.direction");
  read(j, "distance", c.distance);
  read(j, "flipTimes", c.flip_times);
  read(j, "farDistance", c.far_distance);
  read(j, "nearDistance", c.near_distance);
  read(j, "period", c.period);
  read(j, "radius", c.radius);
  read(j, "height", c.height);
  read(j, "angularSpeed", c.angular_speed);
  read(j, "speed", c.speed);
  if (j.contains("panPosition")) c.pan_position = read_vec3(j.at("panPosition"), "camera.panPosition");
  read(j, "panStartYaw", c.pan_start_yaw);
  read(j, "horzFov", c.frustum.horz_fov);
  read(j, "aspect", c.frustum.aspect);
  read(j, "near", c.frustum.near);
  read(j, "far", c.frustum.far);
  read(j, "horzPixels", c.display.horz_pixels);
}

NetworkProfile parse_network(const json& j, const std::filesystem::path& base,
                             std::string& name) {
  if (j.is_string()) {
    name = j.get<std::string>();
    return resolve_network(name, base);
  }
  NetworkProfile p;
  name = "custom";
  if (j.contains("preset")) {
    name = j.at("preset").get<std::string>();
    p = resolve_network(name, base);
  }
  if (j.contains("schedule")) {
    p.schedule.clear();
    for (const auto& row : j.at("schedule")) {
      if (!row.is_array() || row.size() != 2) {
        throw ConfigError("network schedule rows are [start, rate] pairs");
      }
      p.schedule.push_back({row[0].get<double>(), row[1].get<double>()});
    }
  }
  read(j, "cycleLength", p.cycle_length);
  read(j, "packetSize", p.packet_size);
  read(j, "rtt", p.rtt);
  return p;
}

}  // namespace

void Scenario::validate() const {
  if (objects.empty()) throw ValidationError("scenario needs at least one object");
  if (!(duration > 0.0)) throw ValidationError("duration must be > 0");
  if (tile_depth < 0 || tile_depth > kMaxTileDepth) {
    throw ValidationError("tile depth must lie in 0.." + std::to_string(kMaxTileDepth));
  }
  for (const auto& o : objects) {
    if (!(o.speed > 0.0)) throw ValidationError("object speed must be > 0");
    if (o.tau0 < 0.0) throw ValidationError("object tau0 must be >= 0");
    if (o.ladder.empty()) throw ValidationError("object ladder is empty");
    for (std::size_t i = 0; i < o.ladder.size(); ++i) {
      if (!(o.ladder[i] > 0.0) || (i > 0 && !(o.ladder[i] > o.ladder[i - 1]))) {
        throw ValidationError("ladder must be positive and strictly increasing");
      }
    }
    if (!(o.clip_duration > 0.0)) throw ValidationError("clip duration must be > 0");
    if (o.gof_frames < 1) throw ValidationError("GOFs need at least one frame");
  }
  camera.validate();
  network.validate();
  cbm.validate();
  window.validate();
  predictor.validate();
}

NetworkProfile resolve_network(const std::string& name,
                               const std::filesystem::path& base_dir) {
  if (name.rfind("trace:", 0) == 0) {
    return load_network_trace(resolve(base_dir, name.substr(6)));
  }
  return preset(name);
}

Scenario parse_scenario_json(const std::string& text,
                             const std::filesystem::path& base_dir) {
  Scenario s;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("scenario must be a JSON object");
    if (j.contains("multiObject")) {
      double scale = kMultiObjectLadderScale;
      read(j, "multiObjectLadderScale", scale);
      const Scenario scene =
          build_multi_object_scene(j.at("multiObject").get<int>(), scale);
      s.objects = scene.objects;
      s.camera = scene.camera;
    }
    if (j.contains("objects")) {
      s.objects.clear();
      for (const auto& o : j.at("objects")) s.objects.push_back(parse_object(o, base_dir));
    }
    if (j.contains("camera")) parse_camera(j.at("camera"), base_dir, s.camera);
    if (j.contains("network")) s.network = parse_network(j.at("network"), base_dir, s.network_name);
    if (j.contains("algorithm")) s.cbm.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    read(j, "tileDepth", s.tile_depth);
    read(j, "duration", s.duration);
    read(j, "durationUserSeconds", s.duration);
    read(j, "seed", s.seed);
    if (j.contains("outputDir")) s.output_dir = resolve(base_dir, j.at("outputDir").get<std::string>());
    read(j, "recordOptimizerTrace", s.record_optimizer_trace);
    if (j.contains("cbm")) {
      const auto& c = j.at("cbm");
      read(c, "cycle", s.cbm.cycle);
      read(c, "smoothing", s.cbm.smoothing);
      read(c, "startup", s.cbm.startup_seconds);
      read(c, "tbaSafety", s.cbm.tba_safety);
      read(c, "bbaReservoir", s.cbm.bba_reservoir);
      read(c, "bbaCushion", s.cbm.bba_cushion);
      read(c, "queueCap", s.cbm.queue_cap);
      read(c, "chunkGofs", s.cbm.chunk_gofs);
      bool strict = false;
      read(c, "strictBudget", strict);
      s.cbm.budget_mode = strict ? BudgetMode::kStrict : BudgetMode::kOvershoot;
    }
    if (j.contains("window")) {
      const auto& w = j.at("window");
      read(w, "floor", s.window.floor);
      read(w, "cap", s.window.cap);
      read(w, "rampEnd", s.window.ramp_end);
    }
    if (j.contains("predictor")) {
      const auto& p = j.at("predictor");
      read(p, "pErrMin", s.predictor.p_err_min);
      read(p, "pErrSlope", s.predictor.p_err_slope);
      read(p, "fixedWindow", s.predictor.fixed_window);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  s.network.seed = s.seed;
  s.validate();
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str(), path.parent_path());
}

Scenario build_multi_object_scene(int n, double ladder_scale) {
  if (n < 1) throw ValidationError("scene needs at least one object");
  if (!(ladder_scale > 0.0)) throw ValidationError("ladder scale must be positive");
  Scenario s;
  s.objects.clear();
  std::vector<double> ladder = default_ladder_bps();
  if (n > 1) {
    for (double& b : ladder) b *= ladder_scale;
  }
  constexpr double kArcRadius = 3.0;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    ObjectSpec o;
    o.position = Vec3(kArcRadius * std::cos(a), 0.0, kArcRadius * std::sin(a));
    o.ladder = ladder;
    s.objects.push_back(o);
  }
  if (n == 1) {
    s.camera.kind = CameraKind::kStatic;
    s.camera.target = s.objects[0].position;
    return s;
  }
  s.camera.kind = CameraKind::kPan;
  s.camera.pan_position = Vec3::Zero();
  s.camera.pan_start_yaw = 0.0;
  s.camera.angular_speed = 2.0 * std::numbers::pi / 40.0;
  return s;
}

SyntheticObject make_source(const ObjectSpec& spec, int tile_depth) {
  ObjectManifest m;
  if (!spec.manifest.empty()) {
    m = load_manifest(spec.manifest);
    m.object_to_world_translation += spec.position;
  } else {
    m = make_default_manifest(tile_depth, spec.ladder);
    m.duration = spec.clip_duration;
    m.object_to_world_translation = spec.position;
  }
  m.validate();
  return SyntheticObject(std::move(m), spec.shell, spec.gof_frames);
}

}  // namespace volu
