#pragma once

// Line-based scene description:
//
//   # comment
//   mat <id> lambert r g b
//   mat <id> mirror r g b
//   sphere cx cy cz r <mat>
//   plane px py pz nx ny nz <mat>
//   box minx miny minz maxx maxy maxz <mat>
//   light x y z ir ig ib
//   env default
//   patch ox oy oz tx ty tz bx by bz ex ey
//
// Material ids are arbitrary tokens and must be defined before use.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "radtex/baker.h"
#include "radtex/tracer.h"

namespace radtex {

struct SceneFile {
  Scene scene;
  std::optional<SurfacePatch> patch;
};

// Throws ConfigError with the offending line number on malformed input.
SceneFile parse_scene(std::string_view text);
// Throws IoError if the file cannot be read.
SceneFile load_scene(const std::filesystem::path& path);

}  // namespace radtex
