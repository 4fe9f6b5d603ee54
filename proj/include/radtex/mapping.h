#pragma once

// Hemisphere <-> bucket coordinate mappings.
//
// Directions live in tangent space: z is the surface normal, so the viewer
// hemisphere is z >= 0. The chain used for lookups is
//
//   incidence (UnitDir3) -> equisolid disc (DiscPoint2) -> square (SquarePoint2)
//
// and baking walks it backwards. The disc radius of a direction at angle
// theta from the normal is sqrt(2) * sin(theta / 2), which makes the disc an
// equal-area image of the hemisphere.

#include <cmath>
#include <cstddef>
#include <span>

#include "radtex/vec.h"

namespace radtex {

struct UnitDir3 {
  double x = 0, y = 0, z = 1;

  Vec3 vec() const { return {x, y, z}; }
  // Normalizes v. v must be non-zero.
  static UnitDir3 from(const Vec3& v);
  bool operator==(const UnitDir3&) const = default;
};

struct DiscPoint2 {
  double x = 0, y = 0;

  double radius() const { return std::hypot(x, y); }
  bool operator==(const DiscPoint2&) const = default;
};

// Centered bucket coordinate in [-1, 1]^2.
struct SquarePoint2 {
  double x = 0, y = 0;

  bool operator==(const SquarePoint2&) const = default;
};

struct GeneralProjection {
  DiscPoint2 disc;
  // Third component of sqrt(2) * normalize(i + n), i.e. sqrt(2) * cos(theta / 2).
  double axial = 0;
};

namespace mapping {

// Tangent-space forward equisolid projection. Throws DomainError for i = (0,0,-1).
DiscPoint2 project_equisolid(const UnitDir3& i);

// Forward projection against an explicit normal: sqrt(2) * normalize(i + n).
// Throws DomainError when i = -n.
GeneralProjection project_equisolid_general(const UnitDir3& i, const UnitDir3& n);

// Inverse of project_equisolid. Throws DomainError for |a| > 1.
UnitDir3 unproject_equisolid(const DiscPoint2& a);

// Inverse through the reconstructed halfway vector: the normal reflected about
// h = (a.x / sqrt2, a.y / sqrt2, sqrt(1 - |a|^2 / 2)).
UnitDir3 unproject_equisolid_general(const DiscPoint2& a, const UnitDir3& n);

// Radial stretch of the unit disc onto [-1, 1]^2. (0,0) maps to (0,0).
SquarePoint2 disc_to_square(const DiscPoint2& a);
DiscPoint2 square_to_disc(const SquarePoint2& b);

// Mirror of unproject_equisolid about the normal; the direction baked for a
// disc point in reflection atlases.
UnitDir3 reflection_vector(const DiscPoint2& a);

// Keeps lookups half a texel away from the bucket border so bilinear
// filtering never reaches a neighboring bucket. Throws ConfigError for res < 2.
SquarePoint2 clamp_bucket_coord(const SquarePoint2& b, int bucket_res);

// project -> squarify -> clamp. Below-horizon directions are pulled onto the
// rim before squarifying.
SquarePoint2 incidence_to_bucket_coord(const UnitDir3& i, int bucket_res);

// atan2(y, x) of the disc point; diagnostics only.
double azimuth(const DiscPoint2& a);

// 32-bit bulk paths. Inputs/outputs are interleaved xyz / xy arrays and must
// hold matching counts. No domain checks beyond clamping sqrt arguments.
void project_equisolid_bulk(std::span<const float> xyz, std::span<float> xy);
void unproject_equisolid_bulk(std::span<const float> xy, std::span<float> xyz);

}  // namespace mapping
}  // namespace radtex
