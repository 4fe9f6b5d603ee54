#include "radtex/baker.h"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "radtex/errors.h"

namespace radtex {

namespace {

constexpr double kFrameTolerance = 1e-6;
// Start of the eye ray used for shaded bakes, measured back along the eye direction.
constexpr double kEyeProbeOffset = 1e-3;

bool finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

}  // namespace

SurfacePatch SurfacePatch::from_axes(const Vec3& origin, const Vec3& tangent, const Vec3& bitangent, double width,
                                     double height) {
  if (!(length(tangent) > 0) || !(length(bitangent) > 0)) throw ConfigError("patch axes must be non-zero");
  SurfacePatch p;
  p.origin = origin;
  p.tangent = normalize(tangent);
  p.bitangent = normalize(bitangent);
  p.normal = cross(p.tangent, p.bitangent);
  p.width = width;
  p.height = height;
  p.validate();
  return p;
}

void SurfacePatch::validate() const {
  if (!finite(origin) || !finite(tangent) || !finite(bitangent) || !finite(normal)) {
    throw ConfigError("patch has non-finite values");
  }
  if (!(width > 0 && height > 0) || !std::isfinite(width) || !std::isfinite(height)) {
    throw ConfigError("patch extent must be positive");
  }
  for (const Vec3* axis : {&tangent, &bitangent, &normal}) {
    if (std::abs(length(*axis) - 1.0) > kFrameTolerance) throw ConfigError("patch frame axes must be unit length");
  }
  if (std::abs(dot(tangent, bitangent)) > kFrameTolerance || std::abs(dot(tangent, normal)) > kFrameTolerance ||
      std::abs(dot(bitangent, normal)) > kFrameTolerance) {
    throw ConfigError("patch frame axes must be orthogonal");
  }
  if (length(cross(tangent, bitangent) - normal) > kFrameTolerance) {
    throw ConfigError("patch normal must equal tangent x bitangent");
  }
}

Vec3 SurfacePatch::point_at(double u, double v) const {
  return origin + tangent * (u * width) + bitangent * (v * height);
}

Vec3 SurfacePatch::to_world(const UnitDir3& d) const { return tangent * d.x + bitangent * d.y + normal * d.z; }

UnitDir3 SurfacePatch::to_tangent(const Vec3& w) const {
  return UnitDir3::from({dot(tangent, w), dot(bitangent, w), dot(normal, w)});
}

DiscPoint2 texel_disc(LocalTexel t, int bucket_res) {
  return mapping::square_to_disc({texel_center(t.lx, bucket_res), texel_center(t.ly, bucket_res)});
}

UnitDir3 texel_direction(LocalTexel t, int bucket_res) {
  return mapping::unproject_equisolid(texel_disc(t, bucket_res));
}

InteriorWall interior_wall(const SurfacePatch& patch, double depth, double u, double v, const UnitDir3& d) {
  // Room coordinates: x in [0, width], y in [0, height], z in [-depth, 0].
  // The eye ray continues through the window along -d.
  const double px = u * patch.width;
  const double py = v * patch.height;
  const double dx = -d.x, dy = -d.y, dz = -d.z;
  double best = std::numeric_limits<double>::infinity();
  InteriorWall wall = InteriorWall::kBack;
  const auto consider = [&](double t, InteriorWall w) {
    if (t >= 0 && t < best) {
      best = t;
      wall = w;
    }
  };
  if (dx > 0) consider((patch.width - px) / dx, InteriorWall::kPosX);
  if (dx < 0) consider(-px / dx, InteriorWall::kNegX);
  if (dy > 0) consider((patch.height - py) / dy, InteriorWall::kPosY);
  if (dy < 0) consider(-py / dy, InteriorWall::kNegY);
  if (dz < 0) consider(-depth / dz, InteriorWall::kBack);
  if (dz > 0) consider(0.0, InteriorWall::kWindow);
  return wall;
}

namespace {

struct TexelBaker {
  const Scene& scene;
  const SurfacePatch& patch;
  const BakeMode& mode;
  const BakeOptions& options;

  // Radiance for one texel direction. `disc` is the texel's equisolid disc point.
  Rgb evaluate(const Vec3& p, double u, double v, const DiscPoint2& disc) const {
    return std::visit(
        [&](const auto& m) -> Rgb {
          using M = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<M, MirrorMode>) {
            const Vec3 dir = patch.to_world(mapping::reflection_vector(disc));
            return trace(scene, Ray{p + patch.normal * kRayEpsilon, dir}, options.max_depth);
          } else if constexpr (std::is_same_v<M, ShadedMode>) {
            const Vec3 eye = patch.to_world(mapping::unproject_equisolid(disc));
            return trace(scene, Ray{p + eye * kEyeProbeOffset, -eye}, options.max_depth);
          } else if constexpr (std::is_same_v<M, ShadowMaskMode>) {
            const Vec3 light_dir = patch.to_world(mapping::unproject_equisolid(disc));
            const double lit = unoccluded(scene, p + patch.normal * kRayEpsilon, light_dir) ? 1.0 : 0.0;
            return {lit, lit, lit};
          } else {
            const auto wall = interior_wall(patch, m.depth, u, v, mapping::unproject_equisolid(disc));
            return m.walls[static_cast<std::size_t>(wall)];
          }
        },
        mode);
  }

  void bake_bucket(RadianceAtlas& atlas, BucketIndex b) const {
    const AtlasHeader& h = atlas.header();
    const int n = static_cast<int>(h.bucket_res);
    const double u = (b.bx + 0.5) / h.width_buckets;
    const double v = (b.by + 0.5) / h.height_buckets;
    const Vec3 p = patch.point_at(u, v);
    const int s = options.supersample;
    for (int ly = 0; ly < n; ++ly) {
      for (int lx = 0; lx < n; ++lx) {
        Rgb value;
        if (s == 1) {
          value = evaluate(p, u, v, texel_disc({lx, ly}, n));
        } else {
          const double cx = texel_center(lx, n);
          const double cy = texel_center(ly, n);
          const double step = 2.0 / n / s;
          for (int sy = 0; sy < s; ++sy) {
            for (int sx = 0; sx < s; ++sx) {
              const SquarePoint2 q{cx + (sx + 0.5 - s * 0.5) * step, cy + (sy + 0.5 - s * 0.5) * step};
              value += evaluate(p, u, v, mapping::square_to_disc(q));
            }
          }
          value = value * (1.0 / (s * s));
        }
        atlas.set_texel(b, {lx, ly}, value);
      }
    }
  }
};

}  // namespace

RadianceAtlas bake(const Scene& scene, const SurfacePatch& patch, int width_buckets, int height_buckets,
                   int bucket_res, const BakeMode& mode, const BakeOptions& options) {
  scene.validate();
  patch.validate();
  if (width_buckets < 1 || height_buckets < 1) throw ConfigError("bake grid must be at least 1x1");
  if (bucket_res < 2) throw ConfigError("bucket resolution must be >= 2");
  if (options.supersample < 1) throw ConfigError("supersample factor must be >= 1");
  if (options.max_depth < 0) throw ConfigError("max depth must be >= 0");
  if (const auto* interior = std::get_if<InteriorMode>(&mode); interior && !(interior->depth > 0)) {
    throw ConfigError("interior depth must be positive");
  }

  AtlasHeader header;
  header.width_buckets = static_cast<uint32_t>(width_buckets);
  header.height_buckets = static_cast<uint32_t>(height_buckets);
  header.bucket_res = static_cast<uint32_t>(bucket_res);
  if (std::holds_alternative<ShadowMaskMode>(mode)) {
    header.channels = 1;
    header.kind = TexelKind::kMask;
  } else {
    if (options.texel == TexelKind::kMask) throw ConfigError("mask texels are only produced by shadow bakes");
    header.channels = 3;
    header.kind = options.texel;
  }
  RadianceAtlas atlas(header);

  const TexelBaker baker{scene, patch, mode, options};
  const int bucket_count = width_buckets * height_buckets;
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(bucket_count));

  // Buckets are claimed dynamically; each writes only its own texels.
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  const auto worker = [&](unsigned id) {
    try {
      for (int k = next.fetch_add(1); k < bucket_count; k = next.fetch_add(1)) {
        baker.bake_bucket(atlas, {k % width_buckets, k / width_buckets});
      }
    } catch (...) {
      errors[id] = std::current_exception();
      next = bucket_count;
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return atlas;
}

}  // namespace radtex
