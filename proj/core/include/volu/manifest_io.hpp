#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "volu/media_model.hpp"

namespace volu {

// JSON manifest: one document per object, keys match the ObjectManifest
// fields in camelCase. The rotation is stored as [w, x, y, z].
std::string write_manifest_json(const ObjectManifest& manifest);
ObjectManifest parse_manifest_json(std::string_view text);

ObjectManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const std::filesystem::path& path,
                   const ObjectManifest& manifest);

}  // namespace volu
