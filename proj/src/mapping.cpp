#include "radtex/mapping.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "radtex/errors.h"

namespace radtex {

UnitDir3 UnitDir3::from(const Vec3& v) {
  const double len = length(v);
  if (!(len > 0.0) || !std::isfinite(len)) throw DomainError("cannot normalize a zero or non-finite vector");
  return {v.x / len, v.y / len, v.z / len};
}

namespace mapping {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
// Slack on |a| <= 1 for points produced by rounding.
constexpr double kDiscSlack = 1e-9;

template <typename T>
T clamped_sqrt(T v) {
  return std::sqrt(std::max(v, T(0)));
}

template <typename T>
void project(T ix, T iy, T iz, T& ax, T& ay) {
  const T s = std::sqrt(T(2)) / std::sqrt(ix * ix + iy * iy + (iz + 1) * (iz + 1));
  ax = s * ix;
  ay = s * iy;
}

template <typename T>
void unproject(T ax, T ay, T& ix, T& iy, T& iz) {
  const T r2 = ax * ax + ay * ay;
  const T s = clamped_sqrt(T(2) - r2);
  ix = ax * s;
  iy = ay * s;
  iz = T(1) - r2;
}

void check_disc(const DiscPoint2& a) {
  if (!(a.x * a.x + a.y * a.y <= 1.0 + kDiscSlack)) {
    throw DomainError("disc point outside the unit disc (below-horizon direction)");
  }
}

}  // namespace

DiscPoint2 project_equisolid(const UnitDir3& i) {
  if (i.z <= -1.0) throw DomainError("antipodal incidence (0,0,-1) has no equisolid image");
  DiscPoint2 a;
  project(i.x, i.y, i.z, a.x, a.y);
  return a;
}

GeneralProjection project_equisolid_general(const UnitDir3& i, const UnitDir3& n) {
  const Vec3 sum = i.vec() + n.vec();
  const double len = length(sum);
  if (!(len > 0.0)) throw DomainError("incidence is opposite to the normal");
  const Vec3 a = sum * (kSqrt2 / len);
  return {{a.x, a.y}, a.z};
}

UnitDir3 unproject_equisolid(const DiscPoint2& a) {
  check_disc(a);
  UnitDir3 i;
  unproject(a.x, a.y, i.x, i.y, i.z);
  return i;
}

UnitDir3 unproject_equisolid_general(const DiscPoint2& a, const UnitDir3& n) {
  check_disc(a);
  const Vec3 half{a.x / kSqrt2, a.y / kSqrt2, clamped_sqrt(1.0 - (a.x * a.x + a.y * a.y) / 2.0)};
  const Vec3 normal = n.vec();
  const Vec3 i = 2.0 * (dot(half, normal) * half - normal) + normal;
  return {i.x, i.y, i.z};
}

SquarePoint2 disc_to_square(const DiscPoint2& a) {
  const double m = std::max(std::abs(a.x), std::abs(a.y));
  if (m == 0.0) return {0.0, 0.0};
  const double s = std::hypot(a.x, a.y) / m;
  return {a.x * s, a.y * s};
}

DiscPoint2 square_to_disc(const SquarePoint2& b) {
  const double r = std::hypot(b.x, b.y);
  if (r == 0.0) return {0.0, 0.0};
  const double s = std::max(std::abs(b.x), std::abs(b.y)) / r;
  return {b.x * s, b.y * s};
}

UnitDir3 reflection_vector(const DiscPoint2& a) {
  check_disc(a);
  UnitDir3 r;
  unproject(a.x, a.y, r.x, r.y, r.z);
  r.x = -r.x;
  r.y = -r.y;
  return r;
}

SquarePoint2 clamp_bucket_coord(const SquarePoint2& b, int bucket_res) {
  if (bucket_res < 2) throw ConfigError("bucket resolution must be >= 2, got " + std::to_string(bucket_res));
  const double hi = 1.0 - 1.0 / bucket_res;
  return {std::clamp(b.x, -hi, hi), std::clamp(b.y, -hi, hi)};
}

SquarePoint2 incidence_to_bucket_coord(const UnitDir3& i, int bucket_res) {
  DiscPoint2 a = project_equisolid(i);
  const double r = a.radius();
  if (r > 1.0) {
    a.x /= r;
    a.y /= r;
  }
  return clamp_bucket_coord(disc_to_square(a), bucket_res);
}

double azimuth(const DiscPoint2& a) { return std::atan2(a.y, a.x); }

void project_equisolid_bulk(std::span<const float> xyz, std::span<float> xy) {
  if (xyz.size() % 3 != 0 || xy.size() != xyz.size() / 3 * 2) {
    throw DomainError("bulk projection: mismatched buffer sizes");
  }
  const std::size_t count = xyz.size() / 3;
  for (std::size_t k = 0; k < count; ++k) {
    project(xyz[3 * k], xyz[3 * k + 1], xyz[3 * k + 2], xy[2 * k], xy[2 * k + 1]);
  }
}

void unproject_equisolid_bulk(std::span<const float> xy, std::span<float> xyz) {
  if (xy.size() % 2 != 0 || xyz.size() != xy.size() / 2 * 3) {
    throw DomainError("bulk unprojection: mismatched buffer sizes");
  }
  const std::size_t count = xy.size() / 2;
  for (std::size_t k = 0; k < count; ++k) {
    unproject(xy[2 * k], xy[2 * k + 1], xyz[3 * k], xyz[3 * k + 1], xyz[3 * k + 2]);
  }
}

}  // namespace mapping
}  // namespace radtex
