#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "radtex/mapping.h"

namespace radtex::testing {

// Uniform over the z >= 0 hemisphere (z uniform in [0,1] is uniform in solid angle).
inline UnitDir3 random_hemisphere(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double z = uni(rng);
  const double phi = 2 * std::numbers::pi * uni(rng);
  const double r = std::sqrt(std::max(0.0, 1 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

// Uniform over the closed unit disc by rejection.
inline DiscPoint2 random_disc(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (;;) {
    const DiscPoint2 a{uni(rng), uni(rng)};
    if (a.x * a.x + a.y * a.y <= 1.0) return a;
  }
}

}  // namespace radtex::testing
