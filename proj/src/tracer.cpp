#include "radtex/tracer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "radtex/errors.h"

namespace radtex {

namespace {

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

std::optional<double> hit_sphere(const Sphere& s, const Ray& ray) {
  const Vec3 oc = ray.origin - s.center;
  const double b = dot(oc, ray.dir);
  const double c = dot(oc, oc) - s.radius * s.radius;
  const double disc = b * b - c;
  if (disc < 0) return std::nullopt;
  const double root = std::sqrt(disc);
  for (const double t : {-b - root, -b + root}) {
    if (t > ray.t_min && t < ray.t_max) return t;
  }
  return std::nullopt;
}

std::optional<double> hit_plane(const Plane& p, const Ray& ray) {
  const double denom = dot(p.normal, ray.dir);
  if (denom == 0) return std::nullopt;
  const double t = dot(p.point - ray.origin, p.normal) / denom;
  if (t > ray.t_min && t < ray.t_max) return t;
  return std::nullopt;
}

struct BoxHit {
  double t;
  Vec3 normal;
};

// Slab test; returns the entry face, or the exit face when the origin is inside.
std::optional<BoxHit> hit_box(const Box& box, const Ray& ray) {
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  int near_axis = 0, far_axis = 0;
  for (int axis = 0; axis < 3; ++axis) {
    const double o = ray.origin[axis];
    const double d = ray.dir[axis];
    const double lo = box.min[axis];
    const double hi = box.max[axis];
    if (d == 0) {
      if (o < lo || o > hi) return std::nullopt;
      continue;
    }
    double t0 = (lo - o) / d;
    double t1 = (hi - o) / d;
    if (t0 > t1) std::swap(t0, t1);
    if (t0 > t_near) {
      t_near = t0;
      near_axis = axis;
    }
    if (t1 < t_far) {
      t_far = t1;
      far_axis = axis;
    }
    if (t_near > t_far) return std::nullopt;
  }
  const auto axis_normal = [](int axis) {
    Vec3 n;
    if (axis == 0) n.x = 1;
    if (axis == 1) n.y = 1;
    if (axis == 2) n.z = 1;
    return n;
  };
  if (t_near > ray.t_min && t_near < ray.t_max) return BoxHit{t_near, axis_normal(near_axis)};
  if (t_far > ray.t_min && t_far < ray.t_max) return BoxHit{t_far, axis_normal(far_axis)};
  return std::nullopt;
}

}  // namespace

void Scene::validate() const {
  for (std::size_t k = 0; k < primitives.size(); ++k) {
    const Primitive& p = primitives[k];
    const std::string where = "primitive " + std::to_string(k) + ": ";
    if (p.material < 0 || static_cast<std::size_t>(p.material) >= materials.size()) {
      throw ConfigError(where + "material id does not resolve");
    }
    if (const auto* s = std::get_if<Sphere>(&p.shape)) {
      if (!finite(s->center) || !std::isfinite(s->radius)) throw ConfigError(where + "non-finite sphere");
      if (!(s->radius > 0)) throw ConfigError(where + "sphere radius must be positive");
    } else if (const auto* pl = std::get_if<Plane>(&p.shape)) {
      if (!finite(pl->point) || !finite(pl->normal)) throw ConfigError(where + "non-finite plane");
      if (std::abs(length(pl->normal) - 1.0) > 1e-6) throw ConfigError(where + "plane normal must be unit length");
    } else if (const auto* b = std::get_if<Box>(&p.shape)) {
      if (!finite(b->min) || !finite(b->max)) throw ConfigError(where + "non-finite box");
      if (!(b->min.x < b->max.x && b->min.y < b->max.y && b->min.z < b->max.z)) {
        throw ConfigError(where + "box min must be below max on every axis");
      }
    }
  }
  for (const Material& m : materials) {
    if (!finite(m.color)) throw ConfigError("non-finite material color");
  }
  for (const PointLight& l : lights) {
    if (!finite(l.position) || !finite(l.intensity)) throw ConfigError("non-finite light");
  }
  if (environment.cells_u < 1 || environment.cells_v < 1) throw ConfigError("environment needs at least one cell");
  if (!finite(environment.odd) || !finite(environment.even)) throw ConfigError("non-finite environment colors");
}

std::optional<Hit> intersect_scene(const Scene& scene, const Ray& ray) {
  std::optional<Hit> best;
  Ray probe = ray;
  for (std::size_t k = 0; k < scene.primitives.size(); ++k) {
    const Primitive& prim = scene.primitives[k];
    double t = 0;
    Vec3 normal;
    if (const auto* s = std::get_if<Sphere>(&prim.shape)) {
      const auto hit = hit_sphere(*s, probe);
      if (!hit) continue;
      t = *hit;
      normal = (probe.origin + probe.dir * t - s->center) / s->radius;
    } else if (const auto* pl = std::get_if<Plane>(&prim.shape)) {
      const auto hit = hit_plane(*pl, probe);
      if (!hit) continue;
      t = *hit;
      normal = pl->normal;
    } else {
      const auto hit = hit_box(std::get<Box>(prim.shape), probe);
      if (!hit) continue;
      t = hit->t;
      normal = hit->normal;
    }
    if (dot(normal, ray.dir) > 0) normal = -normal;
    best = Hit{t, ray.origin + ray.dir * t, normal, prim.material, k};
    // Later primitives must be strictly nearer to win.
    probe.t_max = t;
  }
  return best;
}

Rgb environment_radiance(const Environment& env, const Vec3& dir) {
  constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  const double azimuth = (dir.z == 0 && dir.x == 0) ? 0.0 : std::atan2(dir.z, dir.x);
  const double u = azimuth / (2 * std::numbers::pi) + 0.5;
  const double v = dir.y * 0.5 + 0.5;
  const long cu = static_cast<long>(std::floor(std::clamp(u, 0.0, kBelowOne) * env.cells_u));
  const long cv = static_cast<long>(std::floor(std::clamp(v, 0.0, kBelowOne) * env.cells_v));
  return (cu + cv) % 2 == 1 ? env.odd : env.even;
}

Vec3 reflect(const Vec3& d, const Vec3& n) { return d - 2.0 * dot(d, n) * n; }

int shadow_visibility(const Scene& scene, const Vec3& point, const PointLight& light) {
  const Vec3 to_light = light.position - point;
  const double dist = length(to_light);
  if (dist == 0) return 1;
  return intersect_scene(scene, Ray{point, to_light / dist, 0.0, dist}) ? 0 : 1;
}

bool unoccluded(const Scene& scene, const Vec3& origin, const Vec3& dir) {
  return !intersect_scene(scene, Ray{origin, dir});
}

Rgb trace(const Scene& scene, const Ray& ray, int depth) {
  const auto hit = intersect_scene(scene, ray);
  if (!hit) return environment_radiance(scene.environment, ray.dir);
  const Material& m = scene.materials[static_cast<std::size_t>(hit->material)];

  if (m.type == Material::Type::kMirror) {
    const Vec3 dir = normalize(reflect(ray.dir, hit->normal));
    if (depth <= 0) return mul(m.color, environment_radiance(scene.environment, dir));
    return mul(m.color, trace(scene, Ray{hit->point + hit->normal * kRayEpsilon, dir}, depth - 1));
  }

  Rgb sum;
  const Vec3 origin = hit->point + hit->normal * kRayEpsilon;
  for (const PointLight& light : scene.lights) {
    const Vec3 to_light = light.position - hit->point;
    const double dist2 = dot(to_light, to_light);
    if (dist2 == 0) continue;
    const double cos_term = dot(hit->normal, to_light) / std::sqrt(dist2);
    if (cos_term <= 0) continue;
    if (!shadow_visibility(scene, origin, light)) continue;
    sum += light.intensity * (cos_term / dist2);
  }
  return mul(m.color, sum) * (1.0 / std::numbers::pi);
}

}  // namespace radtex
