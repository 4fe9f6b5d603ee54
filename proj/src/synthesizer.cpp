#include "radtex/synthesizer.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "radtex/errors.h"

namespace radtex {

namespace {

struct ViewBasis {
  Vec3 forward, right, up;
  double tan_half;
  double aspect;
};

ViewBasis view_basis(const Camera& c) {
  ViewBasis b;
  b.forward = normalize(c.look_at - c.position);
  b.right = normalize(cross(b.forward, c.up));
  b.up = cross(b.right, b.forward);
  b.tan_half = std::tan(c.vfov_deg * std::numbers::pi / 360.0);
  b.aspect = static_cast<double>(c.width) / c.height;
  return b;
}

// Points closer than this to the eye plane are not rasterized.
constexpr double kNearPlane = 1e-6;

template <typename Fn>
void parallel_rows(int rows, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max(rows, 1)));
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(threads);
  const auto worker = [&](unsigned id) {
    try {
      for (int y = next.fetch_add(1); y < rows; y = next.fetch_add(1)) fn(y);
    } catch (...) {
      errors[id] = std::current_exception();
      next = rows;
    }
  };
  if (threads <= 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Screen-space vertex: pixel coordinates plus view depth.
struct ScreenVertex {
  double x, y, depth;
};

}  // namespace

void Camera::validate() const {
  if (!(width > 0 && height > 0)) throw ConfigError("camera resolution must be positive");
  if (!(vfov_deg > 0 && vfov_deg < 180)) throw ConfigError("vertical field of view must be in (0, 180) degrees");
  const Vec3 view = look_at - position;
  if (!(length(view) > 0)) throw ConfigError("camera position and look-at coincide");
  if (!(length(cross(view, up)) > 1e-12 * length(view) * length(up))) {
    throw ConfigError("camera up vector is parallel to the view direction");
  }
}

Ray Camera::ray_through(double px, double py) const {
  const ViewBasis b = view_basis(*this);
  const double sx = (2.0 * px / width - 1.0) * b.tan_half * b.aspect;
  const double sy = (1.0 - 2.0 * py / height) * b.tan_half;
  return Ray{position, normalize(b.forward + b.right * sx + b.up * sy)};
}

void Mesh::validate() const {
  constexpr double kTol = 1e-4;
  for (const Triangle& t : triangles) {
    for (const Vertex& v : t.v) {
      if (!(v.u >= 0 && v.u <= 1 && v.v >= 0 && v.v <= 1)) throw ConfigError("mesh uv outside [0,1]^2");
      const bool unit = std::abs(length(v.tangent) - 1) < kTol && std::abs(length(v.bitangent) - 1) < kTol &&
                        std::abs(length(v.normal) - 1) < kTol;
      const bool ortho = std::abs(dot(v.tangent, v.bitangent)) < kTol && std::abs(dot(v.tangent, v.normal)) < kTol &&
                         std::abs(dot(v.bitangent, v.normal)) < kTol;
      if (!unit || !ortho) throw ConfigError("mesh vertex frame is not orthonormal");
    }
  }
}

Mesh make_patch_quad(const SurfacePatch& patch) {
  patch.validate();
  const auto vertex = [&](double u, double v) {
    return Vertex{patch.point_at(u, v), u, v, patch.tangent, patch.bitangent, patch.normal};
  };
  const Vertex v00 = vertex(0, 0), v10 = vertex(1, 0), v11 = vertex(1, 1), v01 = vertex(0, 1);
  return Mesh{{Triangle{{v00, v10, v11}}, Triangle{{v00, v11, v01}}}};
}

Mesh make_cube(const Vec3& center, double half_size) {
  if (!(half_size > 0)) throw ConfigError("cube half size must be positive");
  Mesh mesh;
  // Each face: outward normal and a tangent; bitangent = normal x tangent so
  // that tangent x bitangent = normal.
  const std::array<std::pair<Vec3, Vec3>, 6> faces{{{{1, 0, 0}, {0, 0, -1}},
                                                    {{-1, 0, 0}, {0, 0, 1}},
                                                    {{0, 1, 0}, {1, 0, 0}},
                                                    {{0, -1, 0}, {1, 0, 0}},
                                                    {{0, 0, 1}, {1, 0, 0}},
                                                    {{0, 0, -1}, {-1, 0, 0}}}};
  for (const auto& [n, t] : faces) {
    const Vec3 bt = cross(n, t);
    const Vec3 origin = center + (n - t - bt) * half_size;
    const SurfacePatch patch{origin, t, bt, n, 2 * half_size, 2 * half_size};
    const Mesh quad = make_patch_quad(patch);
    mesh.triangles.insert(mesh.triangles.end(), quad.triangles.begin(), quad.triangles.end());
  }
  return mesh;
}

Image rasterize(const Mesh& mesh, const RadianceAtlas& atlas, const Camera& camera, const Rgb& background,
                const RasterOptions& options) {
  camera.validate();
  mesh.validate();
  const ViewBasis b = view_basis(camera);
  const int W = camera.width;
  const int H = camera.height;

  struct Prepared {
    const Triangle* tri;
    std::array<ScreenVertex, 3> s;
    double area;
    double min_y, max_y, min_x, max_x;
  };
  std::vector<Prepared> prepared;
  for (const Triangle& t : mesh.triangles) {
    Prepared p{&t, {}, 0, 0, 0, 0, 0};
    bool visible = true;
    for (int k = 0; k < 3; ++k) {
      const Vec3 d = t.v[k].position - camera.position;
      const double depth = dot(d, b.forward);
      if (depth <= kNearPlane) {
        visible = false;
        break;
      }
      const double sx = dot(d, b.right) / (depth * b.tan_half * b.aspect);
      const double sy = dot(d, b.up) / (depth * b.tan_half);
      p.s[k] = {(sx + 1.0) * 0.5 * W, (1.0 - sy) * 0.5 * H, depth};
    }
    // TODO: clip against the near plane instead of dropping straddling triangles.
    if (!visible) continue;
    p.area = (p.s[1].x - p.s[0].x) * (p.s[2].y - p.s[0].y) - (p.s[2].x - p.s[0].x) * (p.s[1].y - p.s[0].y);
    if (p.area == 0 || !std::isfinite(p.area)) continue;
    p.min_x = std::min({p.s[0].x, p.s[1].x, p.s[2].x});
    p.max_x = std::max({p.s[0].x, p.s[1].x, p.s[2].x});
    p.min_y = std::min({p.s[0].y, p.s[1].y, p.s[2].y});
    p.max_y = std::max({p.s[0].y, p.s[1].y, p.s[2].y});
    prepared.push_back(p);
  }

  Image image(W, H, 3);
  parallel_rows(H, options.threads, [&](int y) {
    std::vector<double> depth_row(static_cast<std::size_t>(W), std::numeric_limits<double>::infinity());
    const double py = y + 0.5;
    for (int x = 0; x < W; ++x) {
      image.at(x, y, 0) = static_cast<float>(background.x);
      image.at(x, y, 1) = static_cast<float>(background.y);
      image.at(x, y, 2) = static_cast<float>(background.z);
    }
    for (const Prepared& p : prepared) {
      if (py < p.min_y || py > p.max_y) continue;
      const int x0 = std::max(0, static_cast<int>(std::floor(p.min_x - 0.5)));
      const int x1 = std::min(W - 1, static_cast<int>(std::ceil(p.max_x - 0.5)));
      const auto& s = p.s;
      for (int x = x0; x <= x1; ++x) {
        const double px = x + 0.5;
        // Screen-space barycentrics.
        const double w0 = ((s[1].x - px) * (s[2].y - py) - (s[2].x - px) * (s[1].y - py)) / p.area;
        const double w1 = ((s[2].x - px) * (s[0].y - py) - (s[0].x - px) * (s[2].y - py)) / p.area;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < 0 || w1 < 0 || w2 < 0) continue;
        // Perspective-correct weights.
        const double q0 = w0 / s[0].depth, q1 = w1 / s[1].depth, q2 = w2 / s[2].depth;
        const double inv = 1.0 / (q0 + q1 + q2);
        if (!(inv < depth_row[x])) continue;
        const double a0 = q0 * inv, a1 = q1 * inv, a2 = q2 * inv;
        const auto& v = p.tri->v;
        const auto lerp3 = [&](auto member) { return v[0].*member * a0 + v[1].*member * a1 + v[2].*member * a2; };
        const Vec3 pos = lerp3(&Vertex::position);
        const Vec3 tangent = normalize(lerp3(&Vertex::tangent));
        const Vec3 bitangent = normalize(lerp3(&Vertex::bitangent));
        const Vec3 normal = normalize(lerp3(&Vertex::normal));
        const double u = std::clamp(v[0].u * a0 + v[1].u * a1 + v[2].u * a2, 0.0, 1.0);
        const double vv = std::clamp(v[0].v * a0 + v[1].v * a1 + v[2].v * a2, 0.0, 1.0);
        const Vec3 incidence = normalize(camera.position - pos);
        const Vec3 local{dot(tangent, incidence), dot(bitangent, incidence), dot(normal, incidence)};
        if (local.z <= 0) continue;  // back face
        const Rgb value = sample_plenoptic(atlas, u, vv, UnitDir3::from(local), options.sampling);
        depth_row[x] = inv;
        image.at(x, y, 0) = static_cast<float>(value.x);
        image.at(x, y, 1) = static_cast<float>(value.y);
        image.at(x, y, 2) = static_cast<float>(value.z);
      }
    }
  });
  return image;
}

Image ground_truth(const Scene& scene, const Camera& camera, int max_depth) {
  scene.validate();
  camera.validate();
  Image image(camera.width, camera.height, 3);
  parallel_rows(camera.height, 0, [&](int y) {
    for (int x = 0; x < camera.width; ++x) {
      const Rgb c = trace(scene, camera.ray_through(x + 0.5, y + 0.5), max_depth);
      image.at(x, y, 0) = static_cast<float>(c.x);
      image.at(x, y, 1) = static_cast<float>(c.y);
      image.at(x, y, 2) = static_cast<float>(c.z);
    }
  });
  return image;
}

double psnr(const Image& a, const Image& b, double peak) {
  if (a.width != b.width || a.height != b.height || a.channels != b.channels || a.data.size() != b.data.size()) {
    throw DomainError("psnr: image dimensions differ");
  }
  if (a.data.empty()) throw DomainError("psnr: empty images");
  double sum = 0;
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    const double d = static_cast<double>(a.data[k]) - b.data[k];
    sum += d * d;
  }
  const double mse = sum / static_cast<double>(a.data.size());
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

}  // namespace radtex
