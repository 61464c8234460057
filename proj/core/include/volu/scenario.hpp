#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "volu/camera.hpp"
#include "volu/client_buffer_manager.hpp"
#include "volu/media_model.hpp"
#include "volu/network_simulator.hpp"
#include "volu/utility_model.hpp"
#include "volu/window_buffer.hpp"

namespace volu {

struct ObjectSpec {
  std::filesystem::path manifest;  // empty: synthesize a manifest
  Vec3 position = Vec3::Zero();    // world position of the cube center
  double tau0 = 0.0;
  double speed = 1.0;
  bool loop = false;
  std::vector<double> ladder = default_ladder_bps();
  double clip_duration = 300.0;  // media seconds, synthetic objects only
  ShellSpec shell;
  int gof_frames = kDefaultGofFrames;
};

struct Scenario {
  std::vector<ObjectSpec> objects{ObjectSpec{}};
  CameraSpec camera;
  std::string network_name = "stable";
  NetworkProfile network = preset("stable");
  int tile_depth = 2;
  double duration = 60.0;  // user seconds of playback after t0
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  CbmConfig cbm;
  WindowConfig window;
  PredictorConfig predictor;
  bool record_optimizer_trace = false;

  // Throws ValidationError.
  void validate() const;
};

// Parses the JSON scenario document. Relative paths resolve against
// `base_dir`. Throws ConfigError for malformed input and ValidationError for
// values that break an invariant.
Scenario parse_scenario_json(const std::string& text,
                             const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

// "stable", "variable" or "trace:<file>".
NetworkProfile resolve_network(const std::string& name,
                               const std::filesystem::path& base_dir = {});

// Per-object ladder scale in multi-object scenes. At a quarter of the default
// ladder five objects need 5 Mbps for full coverage at the lowest rung and
// 25 Mbps at the top, so the stable 18 Mbps link forces a choice between
// objects without starving any of them.
inline constexpr double kMultiObjectLadderScale = 0.25;

// n synthetic objects on a 3 m circle around the origin, viewed by a camera
// panning from the origin.
Scenario build_multi_object_scene(int n = 5,
                                  double ladder_scale = kMultiObjectLadderScale);

// Manifest and content source for one object at the scenario's tile depth.
SyntheticObject make_source(const ObjectSpec& spec, int tile_depth);

}  // namespace volu
