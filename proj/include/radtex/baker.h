#pragma once

// Fills radiance atlases. Each bucket texel is walked back through the lookup
// chain (square -> disc -> direction) and the tracer supplies its value.

#include <array>
#include <variant>

#include "radtex/atlas.h"
#include "radtex/mapping.h"
#include "radtex/tracer.h"

namespace radtex {

// Flat rectangular carrier. uv (0,0) is the origin corner, uv (1,1) is
// origin + width * tangent + height * bitangent; normal = tangent x bitangent.
struct SurfacePatch {
  Vec3 origin;
  Vec3 tangent{1, 0, 0};
  Vec3 bitangent{0, 1, 0};
  Vec3 normal{0, 0, 1};
  double width = 1;
  double height = 1;

  // Builds the frame from tangent and bitangent (normalized; must be orthogonal).
  static SurfacePatch from_axes(const Vec3& origin, const Vec3& tangent, const Vec3& bitangent, double width,
                                double height);

  // Throws ConfigError if the frame is not orthonormal and right-handed or the extent is not positive.
  void validate() const;

  Vec3 point_at(double u, double v) const;
  Vec3 to_world(const UnitDir3& d) const;
  UnitDir3 to_tangent(const Vec3& world_dir) const;
};

// Reflection probe: texels store sky/scene radiance along the mirrored
// incidence direction.
struct MirrorMode {};
// Final shaded color of the surface under the patch, as seen from each direction.
struct ShadedMode {};
// Binary visibility along each direction (the direction is a light direction).
struct ShadowMaskMode {};

enum class InteriorWall { kPosX = 0, kNegX = 1, kPosY = 2, kNegY = 3, kBack = 4, kWindow = 5 };

// Virtual room of the given depth behind the patch; each wall a flat color,
// indexed by InteriorWall.
struct InteriorMode {
  double depth = 1;
  std::array<Rgb, 6> walls{{{0.8, 0.2, 0.2},
                            {0.2, 0.8, 0.2},
                            {0.2, 0.2, 0.8},
                            {0.8, 0.8, 0.2},
                            {0.9, 0.9, 0.9},
                            {0.1, 0.1, 0.1}}};
};

using BakeMode = std::variant<MirrorMode, ShadedMode, ShadowMaskMode, InteriorMode>;

struct BakeOptions {
  // f32 or u8; ShadowMaskMode always produces a mask atlas.
  TexelKind texel = TexelKind::kF32;
  int max_depth = kDefaultMaxDepth;
  // 0 = hardware concurrency.
  unsigned threads = 0;
  // s x s stratified directions per texel, averaged. s = 1 bakes exactly the
  // texel-center direction.
  int supersample = 1;
};

// Disc point of a texel center: square_to_disc of ((l + 0.5) * 2 / n - 1).
DiscPoint2 texel_disc(LocalTexel t, int bucket_res);
// Incidence direction of a texel center (inverse orthogonal mapping).
UnitDir3 texel_direction(LocalTexel t, int bucket_res);

// Wall of the interior room seen through (u, v) along eye direction d.
InteriorWall interior_wall(const SurfacePatch& patch, double depth, double u, double v, const UnitDir3& d);

RadianceAtlas bake(const Scene& scene, const SurfacePatch& patch, int width_buckets, int height_buckets,
                   int bucket_res, const BakeMode& mode, const BakeOptions& options = {});

}  // namespace radtex
