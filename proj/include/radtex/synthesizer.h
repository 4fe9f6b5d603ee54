#pragma once

// Software rasterizer that shades purely by atlas lookup, the ray-traced
// reference renderer, and image comparison.

#include <array>
#include <vector>

#include "radtex/atlas.h"
#include "radtex/baker.h"
#include "radtex/image.h"
#include "radtex/tracer.h"

namespace radtex {

struct Camera {
  Vec3 position{0, 0, 5};
  Vec3 look_at;
  Vec3 up{0, 1, 0};
  double vfov_deg = 45;
  int width = 64;
  int height = 64;

  // Throws ConfigError for coincident position/look-at, up parallel to the
  // view axis, vfov outside (0, 180) or an empty image.
  void validate() const;

  // Ray through image position (px, py) in pixels; pixel centers sit at +0.5.
  Ray ray_through(double px, double py) const;
};

struct Vertex {
  Vec3 position;
  double u = 0;
  double v = 0;
  Vec3 tangent{1, 0, 0};
  Vec3 bitangent{0, 1, 0};
  Vec3 normal{0, 0, 1};
};

struct Triangle {
  std::array<Vertex, 3> v;
};

struct Mesh {
  std::vector<Triangle> triangles;

  // Frames orthonormal within 1e-4, uv in [0,1]^2.
  void validate() const;
};

// Two triangles covering the patch with its uv and frame.
Mesh make_patch_quad(const SurfacePatch& patch);
// Axis-aligned cube; every face carries the full atlas.
Mesh make_cube(const Vec3& center, double half_size);

struct RasterOptions {
  SampleOptions sampling;
  // 0 = hardware concurrency.
  unsigned threads = 0;
};

Image rasterize(const Mesh& mesh, const RadianceAtlas& atlas, const Camera& camera, const Rgb& background,
                const RasterOptions& options = {});

Image ground_truth(const Scene& scene, const Camera& camera, int max_depth = kDefaultMaxDepth);

// 10 log10(peak^2 / MSE) over all channels; +infinity for identical images.
// Throws DomainError on mismatched dimensions.
double psnr(const Image& a, const Image& b, double peak = 1.0);

}  // namespace radtex
