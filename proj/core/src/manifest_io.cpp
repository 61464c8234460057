#include "volu/manifest_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "volu/errors.hpp"

namespace volu {

namespace {

using nlohmann::json;

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 3) {
    throw ConfigError(std::string("manifest field ") + key +
                      " must be a 3-element array");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

template <typename T>
T required(const json& j, const char* key) {
  if (!j.contains(key)) {
    throw ConfigError(std::string("manifest is missing field ") + key);
  }
  return j.at(key).get<T>();
}

}  // namespace

std::string write_manifest_json(const ObjectManifest& m) {
  json reps = json::array();
  for (const auto& r : m.representations) {
    reps.push_back({{"id", r.id},
                    {"bandwidth", r.bandwidth},
                    {"width", r.width},
                    {"framerate", r.framerate}});
  }
  const auto& q = m.cube_to_object_rotation;
  json doc = {
      {"maxWidth", m.max_width},
      {"maxFrameRate", m.max_frame_rate},
      {"cubeToObjectScale", m.cube_to_object_scale},
      {"cubeToObjectTranslation", vec_to_json(m.cube_to_object_translation)},
      {"cubeToObjectRotation", json::array({q.w(), q.x(), q.y(), q.z()})},
      {"objectToWorldTranslation", vec_to_json(m.object_to_world_translation)},
      {"tileWidth", m.tile_width},
      {"startTime", m.start_time},
      {"duration", m.duration},
      {"segmentDuration", m.segment_duration},
      {"startNumber", m.start_number},
      {"timescale", m.timescale},
      {"mediaTemplate", m.media_template},
      {"representations", reps},
  };
  return doc.dump(2) + "\n";
}

ObjectManifest parse_manifest_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("manifest is not valid JSON: ") + e.what());
  }
  ObjectManifest m;
  try {
    m.max_width = required<int>(doc, "maxWidth");
    m.max_frame_rate = required<double>(doc, "maxFrameRate");
    m.cube_to_object_scale = required<double>(doc, "cubeToObjectScale");
    m.cube_to_object_translation = vec_from_json(
        doc.at("cubeToObjectTranslation"), "cubeToObjectTranslation");
    const json& q = doc.at("cubeToObjectRotation");
    if (!q.is_array() || q.size() != 4) {
      throw ConfigError("cubeToObjectRotation must be [w, x, y, z]");
    }
    m.cube_to_object_rotation = Eigen::Quaterniond(
        q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
        q[3].get<double>());
    m.object_to_world_translation = vec_from_json(
        doc.at("objectToWorldTranslation"), "objectToWorldTranslation");
    m.tile_width = required<int>(doc, "tileWidth");
    m.start_time = required<double>(doc, "startTime");
    m.duration = required<double>(doc, "duration");
    m.segment_duration = required<double>(doc, "segmentDuration");
    m.start_number = required<int>(doc, "startNumber");
    m.timescale = required<std::uint32_t>(doc, "timescale");
    m.media_template = required<std::string>(doc, "mediaTemplate");
    for (const auto& r : doc.at("representations")) {
      Representation rep;
      rep.id = required<std::string>(r, "id");
      rep.bandwidth = required<double>(r, "bandwidth");
      rep.width = required<int>(r, "width");
      rep.framerate = required<double>(r, "framerate");
      m.representations.push_back(std::move(rep));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  m.validate();
  return m;
}

ObjectManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_manifest_json(buf.str());
}

void save_manifest(const std::filesystem::path& path,
                   const ObjectManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write manifest " + path.string());
  out << write_manifest_json(manifest);
}

}  // namespace volu
