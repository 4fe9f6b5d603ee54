#pragma once

// Deterministic Whitted-style tracer: exact mirrors, Lambert surfaces lit by
// point lights with hard shadows, and a procedural checker sky. It is the
// source of every baked value and of the ground-truth renders.

#include <cstddef>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "radtex/vec.h"

namespace radtex {

// Self-intersection offset along the shading normal, in scene units.
inline constexpr double kRayEpsilon = 1e-4;
inline constexpr int kDefaultMaxDepth = 4;

struct Sphere {
  Vec3 center;
  double radius = 1;
};

struct Plane {
  Vec3 point;
  Vec3 normal{0, 1, 0};
};

struct Box {
  Vec3 min;
  Vec3 max{1, 1, 1};
};

struct Primitive {
  std::variant<Sphere, Plane, Box> shape;
  int material = 0;
};

struct Material {
  enum class Type { kLambert, kMirror };
  Type type = Type::kLambert;
  // Albedo for Lambert, tint for mirrors.
  Rgb color{1, 1, 1};
};

struct PointLight {
  Vec3 position;
  Rgb intensity{1, 1, 1};
};

// Checker sky over (azimuth, elevation): u = atan2(z, x) / 2pi + 0.5,
// v = y / 2 + 0.5, cells_u x cells_v cells alternating between two colors.
struct Environment {
  int cells_u = 16;
  int cells_v = 8;
  Rgb odd{0.9, 0.9, 0.9};
  Rgb even{0.1, 0.2, 0.4};
};

struct Scene {
  std::vector<Primitive> primitives;
  std::vector<Material> materials;
  std::vector<PointLight> lights;
  Environment environment;

  // Throws ConfigError on non-finite values, non-positive radii, inverted
  // boxes, non-unit plane normals or dangling material ids.
  void validate() const;
};

struct Ray {
  Vec3 origin;
  Vec3 dir{0, 0, 1};
  double t_min = 0;
  double t_max = std::numeric_limits<double>::infinity();
};

struct Hit {
  double t = 0;
  Vec3 point;
  // Unit, facing the side the ray came from.
  Vec3 normal;
  int material = 0;
  std::size_t primitive = 0;
};

// Nearest hit in (t_min, t_max); ties go to the earlier primitive.
std::optional<Hit> intersect_scene(const Scene& scene, const Ray& ray);

Rgb environment_radiance(const Environment& env, const Vec3& dir);

// d reflected about unit n.
Vec3 reflect(const Vec3& d, const Vec3& n);

// 1 if the segment from point to the light is unobstructed, else 0. The
// caller offsets point off its surface.
int shadow_visibility(const Scene& scene, const Vec3& point, const PointLight& light);

// True if a ray from origin along dir escapes the scene.
bool unoccluded(const Scene& scene, const Vec3& origin, const Vec3& dir);

// Radiance arriving along -ray.dir at ray.origin. `depth` bounds mirror
// recursion; a mirror hit at depth 0 returns tint * sky along the reflection.
Rgb trace(const Scene& scene, const Ray& ray, int depth = kDefaultMaxDepth);

}  // namespace radtex
