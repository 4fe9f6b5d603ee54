#include "radtex/tracer.h"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "radtex/errors.h"
#include "test_util.h"

namespace radtex {
namespace {

Scene make_scene() {
  Scene s;
  s.materials = {{Material::Type::kLambert, {0.5, 0.5, 0.5}}, {Material::Type::kMirror, {0.5, 1, 1}}};
  return s;
}

Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return normalize(Vec3{g(rng), g(rng), g(rng)});
}

TEST(Intersect, SphereOnAxis) {
  Scene s = make_scene();
  s.primitives.push_back({Sphere{{0, 0, 0}, 1}, 0});
  const auto hit = intersect_scene(s, Ray{{0, 0, -5}, {0, 0, 1}});
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 4.0);
  EXPECT_EQ(hit->normal, (Vec3{0, 0, -1}));
  EXPECT_EQ(hit->point, (Vec3{0, 0, -1}));
}

TEST(Intersect, FromInsideSphereNormalFacesOrigin) {
  Scene s = make_scene();
  s.primitives.push_back({Sphere{{0, 0, 0}, 2}, 0});
  const auto hit = intersect_scene(s, Ray{{0, 0, 0}, {1, 0, 0}});
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 2.0);
  EXPECT_EQ(hit->normal, (Vec3{-1, 0, 0}));
}

TEST(Intersect, Plane) {
  Scene s = make_scene();
  s.primitives.push_back({Plane{{0, 0, 0}, {0, 1, 0}}, 0});
  const auto hit = intersect_scene(s, Ray{{0, 2, 0}, {0, -1, 0}});
  ASSERT_TRUE(hit);
  EXPECT_DOUBLE_EQ(hit->t, 2.0);
  EXPECT_EQ(hit->point, (Vec3{0, 0, 0}));
  EXPECT_EQ(hit->normal, (Vec3{0, 1, 0}));
  // From below the normal flips toward the ray origin.
  const auto below = intersect_scene(s, Ray{{0, -3, 0}, {0, 1, 0}});
  ASSERT_TRUE(below);
  EXPECT_EQ(below->normal, (Vec3{0, -1, 0}));
}

TEST(Intersect, BoxFacesAndInside) {
  Scene s = make_scene();
  s.primitives.push_back({Box{{-1, -1, -1}, {1, 1, 1}}, 0});
  const auto side = intersect_scene(s, Ray{{5, 0.2, 0.3}, {-1, 0, 0}});
  ASSERT_TRUE(side);
  EXPECT_DOUBLE_EQ(side->t, 4.0);
  EXPECT_EQ(side->normal, (Vec3{1, 0, 0}));
  const auto inside = intersect_scene(s, Ray{{0, 0, 0}, {0, 1, 0}});
  ASSERT_TRUE(inside);
  EXPECT_DOUBLE_EQ(inside->t, 1.0);
  EXPECT_EQ(inside->normal, (Vec3{0, -1, 0}));
  EXPECT_FALSE(intersect_scene(s, Ray{{5, 5, 0}, {-1, 0, 0}}));
}

TEST(Intersect, MissAndRange) {
  Scene s = make_scene();
  s.primitives.push_back({Sphere{{0, 0, 0}, 1}, 0});
  EXPECT_FALSE(intersect_scene(s, Ray{{0, 3, -5}, {0, 0, 1}}));
  EXPECT_FALSE(intersect_scene(s, Ray{{0, 0, -5}, {0, 0, 1}, 0, 3.5}));
  EXPECT_FALSE(intersect_scene(s, Ray{{0, 0, -5}, {0, 0, -1}}));
}

TEST(Intersect, TiesGoToEarlierPrimitive) {
  Scene s = make_scene();
  s.primitives.push_back({Sphere{{0, 0, 0}, 1}, 1});
  s.primitives.push_back({Sphere{{0, 0, 0}, 1}, 0});
  const auto hit = intersect_scene(s, Ray{{0, 0, -5}, {0, 0, 1}});
  ASSERT_TRUE(hit);
  EXPECT_EQ(hit->primitive, 0u);
  EXPECT_EQ(hit->material, 1);
}

TEST(Environment, HandEvaluatedCells) {
  const Environment env;
  // (0,1,0): azimuth atan2(0,0) = 0 -> u = 0.5 -> cell 8; v = 1 -> cell 7; 15 is odd.
  EXPECT_EQ(environment_radiance(env, {0, 1, 0}), (Rgb{0.9, 0.9, 0.9}));
  // (1,0,0): u = 0.5, v = 0.5 -> cells (8, 4); 12 is even.
  EXPECT_EQ(environment_radiance(env, {1, 0, 0}), (Rgb{0.1, 0.2, 0.4}));
  // (0,0,-1): azimuth -pi/2 -> u = 0.25 -> cell 4; v = 0.5 -> cell 4; even.
  EXPECT_EQ(environment_radiance(env, {0, 0, -1}), (Rgb{0.1, 0.2, 0.4}));
  // (0,-1,0): u = 0.5 -> 8; v = 0 -> 0; even.
  EXPECT_EQ(environment_radiance(env, {0, -1, 0}), (Rgb{0.1, 0.2, 0.4}));
}

TEST(Environment, TwoColorCodomain) {
  const Environment env;
  std::mt19937_64 rng(41);
  for (int k = 0; k < 10000; ++k) {
    const Rgb c = environment_radiance(env, random_unit(rng));
    ASSERT_TRUE(c == env.odd || c == env.even);
  }
}

TEST(ShadowVisibility, SegmentSemantics) {
  Scene s = make_scene();
  const PointLight light{{0, 5, 0}, {1, 1, 1}};
  EXPECT_EQ(shadow_visibility(s, {0, 0, 0}, light), 1);
  s.primitives.push_back({Sphere{{0, 2.5, 0}, 1}, 0});
  EXPECT_EQ(shadow_visibility(s, {0, 0, 0}, light), 0);
  Scene beyond = make_scene();
  beyond.primitives.push_back({Sphere{{0, 8, 0}, 1}, 0});
  EXPECT_EQ(shadow_visibility(beyond, {0, 0, 0}, light), 1);
  EXPECT_FALSE(unoccluded(beyond, {0, 0, 0}, {0, 1, 0}));
}

TEST(ShadowVisibility, RemovingPrimitivesNeverDarkens) {
  Scene s = make_scene();
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uni(-3, 3);
  for (int k = 0; k < 6; ++k) s.primitives.push_back({Sphere{{uni(rng), uni(rng), uni(rng)}, 0.8}, 0});
  const PointLight light{{0, 6, 0}, {1, 1, 1}};
  std::vector<Vec3> points;
  for (int k = 0; k < 300; ++k) points.push_back({uni(rng), uni(rng), uni(rng)});
  for (std::size_t removed = 0; removed < s.primitives.size(); ++removed) {
    Scene fewer = s;
    fewer.primitives.erase(fewer.primitives.begin() + static_cast<std::ptrdiff_t>(removed));
    for (const Vec3& p : points) {
      if (shadow_visibility(s, p, light) == 1) ASSERT_EQ(shadow_visibility(fewer, p, light), 1);
    }
  }
}

TEST(Trace, EmptySceneSeesEnvironment) {
  const Scene s = make_scene();
  std::mt19937_64 rng(43);
  for (int k = 0; k < 100; ++k) {
    const Vec3 d = random_unit(rng);
    EXPECT_EQ(trace(s, Ray{{1, 2, 3}, d}), environment_radiance(s.environment, d));
  }
}

TEST(Trace, LambertWithoutLightsIsBlack) {
  Scene s = make_scene();
  s.primitives.push_back({Plane{{0, 0, 0}, {0, 1, 0}}, 0});
  EXPECT_EQ(trace(s, Ray{{0, 1, 0}, normalize(Vec3{0.3, -1, 0.2})}), (Rgb{0, 0, 0}));
}

TEST(Trace, LambertClosedForm) {
  Scene s = make_scene();
  s.primitives.push_back({Plane{{0, 0, 0}, {0, 1, 0}}, 0});
  s.lights.push_back({{0, 2, 0}, {4, 4, 4}});
  // N.L = 1, dist^2 = 4: (0.5 / pi) * 4 / 4.
  const Rgb c = trace(s, Ray{{0, 1, 0}, {0, -1, 0}});
  EXPECT_NEAR(c.x, 0.5 / std::numbers::pi, 1e-12);
  // Light at 45 degrees from (1, 0, 0): N.L = 1/sqrt2, dist^2 = 2.
  s.lights[0].position = {0, 1, 0};
  const Rgb oblique = trace(s, Ray{{1, 1, 0}, {0, -1, 0}});
  EXPECT_NEAR(oblique.y, 0.5 / std::numbers::pi * 4 * std::sqrt(0.5) / 2, 1e-12);
  // Occluded light contributes nothing.
  s.primitives.push_back({Sphere{{0.5, 0.5, 0}, 0.2}, 0});
  EXPECT_EQ(trace(s, Ray{{1, 1, 0}, {0, -1, 0}}), (Rgb{0, 0, 0}));
}

TEST(Trace, MirrorSphereNormalIncidence) {
  Scene s = make_scene();
  s.primitives.push_back({Sphere{{0, 0, 0}, 1}, 1});
  const Rgb c = trace(s, Ray{{0, 0, -5}, {0, 0, 1}});
  const Rgb expected = mul(Rgb{0.5, 1, 1}, environment_radiance(s.environment, {0, 0, -1}));
  EXPECT_EQ(c, expected);
  EXPECT_NEAR(c.x, 0.05, 1e-15);
}

TEST(Trace, MirrorDepthExhaustedUsesSkyAlongReflection) {
  Scene s = make_scene();
  s.primitives.push_back({Sphere{{0, 0, 0}, 1}, 1});
  s.primitives.push_back({Sphere{{0, 0, -3}, 0.5}, 0});
  const Ray ray{{0, 0, -1.5}, {0, 0, 1}};
  // With depth 0 the second sphere behind the ray origin is never consulted.
  EXPECT_EQ(trace(s, ray, 0), mul(Rgb{0.5, 1, 1}, environment_radiance(s.environment, {0, 0, -1})));
  EXPECT_EQ(trace(s, ray, 1), (Rgb{0, 0, 0}));
}

TEST(Trace, FacingMirrorsTerminate) {
  Scene s = make_scene();
  s.materials[1].color = {0.9, 0.9, 0.9};
  s.primitives.push_back({Plane{{0, 0, 0}, {0, 1, 0}}, 1});
  s.primitives.push_back({Plane{{0, 1, 0}, {0, 1, 0}}, 1});
  const Rgb c = trace(s, Ray{{0, 0.5, 0}, {0, 1, 0}}, 4);
  // Five mirror hits, then the sky along the final reflection (straight down).
  const Rgb sky = environment_radiance(s.environment, {0, -1, 0});
  EXPECT_NEAR(c.x, std::pow(0.9, 5) * sky.x, 1e-12);
}

TEST(Trace, DeterministicAndNonNegative) {
  Scene s = make_scene();
  s.primitives.push_back({Plane{{0, -1, 0}, {0, 1, 0}}, 0});
  s.primitives.push_back({Sphere{{0, 0, 0}, 1}, 1});
  s.primitives.push_back({Box{{1.5, -1, -0.5}, {2.5, 0, 0.5}}, 0});
  s.lights.push_back({{2, 4, 1}, {10, 8, 6}});
  std::mt19937_64 rng(44);
  for (int k = 0; k < 2000; ++k) {
    const Ray ray{{0, 2, -4}, random_unit(rng)};
    const Rgb a = trace(s, ray);
    const Rgb b = trace(s, ray);
    ASSERT_EQ(std::bit_cast<uint64_t>(a.x), std::bit_cast<uint64_t>(b.x));
    ASSERT_EQ(std::bit_cast<uint64_t>(a.z), std::bit_cast<uint64_t>(b.z));
    ASSERT_GE(a.x, 0);
    ASSERT_GE(a.y, 0);
    ASSERT_GE(a.z, 0);
  }
}

TEST(Reflect, ReflectionLaw) {
  std::mt19937_64 rng(45);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 d = random_unit(rng);
    const Vec3 n = random_unit(rng);
    const Vec3 r = reflect(d, n);
    ASSERT_NEAR(length(r), 1.0, 1e-12);
    const Vec3 expected = d - 2 * dot(d, n) * n;
    ASSERT_NEAR(length(r - expected), 0.0, 1e-12);
    ASSERT_NEAR(dot(r, n), -dot(d, n), 1e-12);
  }
}

TEST(SceneValidate, RejectsBadGeometry) {
  Scene s = make_scene();
  s.primitives.push_back({Sphere{{0, 0, 0}, 0}, 0});
  EXPECT_THROW(s.validate(), ConfigError);
  s.primitives = {{Box{{0, 0, 0}, {1, -1, 1}}, 0}};
  EXPECT_THROW(s.validate(), ConfigError);
  s.primitives = {{Plane{{0, 0, 0}, {0, 2, 0}}, 0}};
  EXPECT_THROW(s.validate(), ConfigError);
  s.primitives = {{Sphere{{0, 0, 0}, 1}, 5}};
  EXPECT_THROW(s.validate(), ConfigError);
  s.primitives = {{Sphere{{0, std::nan(""), 0}, 1}, 0}};
  EXPECT_THROW(s.validate(), ConfigError);
  s.primitives = {{Sphere{{0, 0, 0}, 1}, 0}};
  EXPECT_NO_THROW(s.validate());
}

}  // namespace
}  // namespace radtex
