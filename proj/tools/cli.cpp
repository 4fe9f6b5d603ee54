#include "cli.h"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "radtex/atlas.h"
#include "radtex/baker.h"
#include "radtex/codec.h"
#include "radtex/errors.h"
#include "radtex/image.h"
#include "radtex/mapping.h"
#include "radtex/scene_file.h"
#include "radtex/synthesizer.h"

namespace radtex::cli {

namespace {

// Malformed command-line values map to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<double> split_numbers(const std::string& text, char sep, std::size_t expected, const char* what) {
  std::vector<double> values;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("bad ") + what + " '" + text + "'");
    }
  }
  if (values.size() != expected) throw UsageError(std::string("bad ") + what + " '" + text + "'");
  return values;
}

Vec3 parse_vec3(const std::string& text, const char* what) {
  const auto v = split_numbers(text, ',', 3, what);
  return {v[0], v[1], v[2]};
}

std::pair<int, int> parse_dims(const std::string& text, const char* what) {
  const auto v = split_numbers(text, 'x', 2, what);
  if (v[0] != std::floor(v[0]) || v[1] != std::floor(v[1]) || v[0] < 1 || v[1] < 1 || v[0] > 1e6 || v[1] > 1e6) {
    throw UsageError(std::string("bad ") + what + " '" + text + "'");
  }
  return {static_cast<int>(v[0]), static_cast<int>(v[1])};
}

// px,py,pz:lx,ly,lz:ux,uy,uz:vfov
Camera parse_camera(const std::string& text, const std::string& res) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ':');) parts.push_back(part);
  if (parts.size() != 4) throw UsageError("camera must be px,py,pz:lx,ly,lz:ux,uy,uz:vfov");
  Camera cam;
  cam.position = parse_vec3(parts[0], "camera position");
  cam.look_at = parse_vec3(parts[1], "camera look-at");
  cam.up = parse_vec3(parts[2], "camera up");
  cam.vfov_deg = split_numbers(parts[3], ',', 1, "camera vfov")[0];
  std::tie(cam.width, cam.height) = parse_dims(res, "resolution");
  return cam;
}

void write_image(const Image& image, const std::string& path, bool pfm) {
  if (pfm) {
    write_pfm(image, path);
  } else {
    write_ppm(image, path);
  }
}

struct Check {
  const char* name;
  bool pass;
  std::string detail;
};

UnitDir3 random_hemisphere(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double z = uni(rng);
  const double phi = 2 * std::numbers::pi * uni(rng);
  const double r = std::sqrt(std::max(0.0, 1 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

std::vector<Check> run_selftest() {
  std::vector<Check> checks;
  std::mt19937_64 rng(20240613);

  {
    constexpr int kCount = 100000;
    double err64 = 0, err32 = 0, radius_err = 0;
    std::vector<float> xyz, xy(2 * kCount), back(3 * kCount);
    std::vector<UnitDir3> dirs;
    for (int k = 0; k < kCount; ++k) {
      const UnitDir3 i = random_hemisphere(rng);
      dirs.push_back(i);
      const DiscPoint2 a = mapping::project_equisolid(i);
      const UnitDir3 r = mapping::unproject_equisolid(a);
      err64 = std::max({err64, std::abs(r.x - i.x), std::abs(r.y - i.y), std::abs(r.z - i.z)});
      const double theta = std::acos(std::clamp(i.z, -1.0, 1.0));
      radius_err = std::max(radius_err, std::abs(a.radius() - std::numbers::sqrt2 * std::sin(theta / 2)));
      xyz.insert(xyz.end(), {static_cast<float>(i.x), static_cast<float>(i.y), static_cast<float>(i.z)});
    }
    mapping::project_equisolid_bulk(xyz, xy);
    mapping::unproject_equisolid_bulk(xy, back);
    for (int k = 0; k < kCount; ++k) {
      const UnitDir3& i = dirs[k];
      err32 = std::max({err32, std::abs(back[3 * k] - i.x), std::abs(back[3 * k + 1] - i.y),
                        std::abs(back[3 * k + 2] - i.z)});
    }
    checks.push_back({"round-trip-f64", err64 <= 1e-6, "max error " + std::to_string(err64)});
    checks.push_back({"round-trip-f32", err32 <= 1e-4, "max error " + std::to_string(err32)});
    checks.push_back({"radius-law", radius_err < 1e-6, "max error " + std::to_string(radius_err)});
  }

  {
    constexpr int kCount = 1000000;
    const double radii[] = {0.25, 0.5, 0.75};
    int inside[3] = {0, 0, 0};
    for (int k = 0; k < kCount; ++k) {
      const double r = mapping::project_equisolid(random_hemisphere(rng)).radius();
      for (int j = 0; j < 3; ++j) inside[j] += r <= radii[j] ? 1 : 0;
    }
    bool ok = true;
    std::string detail;
    for (int j = 0; j < 3; ++j) {
      const double p = radii[j] * radii[j];
      const double frac = static_cast<double>(inside[j]) / kCount;
      const double se = std::sqrt(p * (1 - p) / kCount);
      ok = ok && std::abs(frac - p) <= 3 * se;
      detail += "r=" + std::to_string(radii[j]) + " z=" + std::to_string((frac - p) / se) + " ";
    }
    checks.push_back({"equal-area", ok, detail});
  }

  {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    double err = 0;
    for (int k = 0; k < 100000; ++k) {
      DiscPoint2 a{uni(rng), uni(rng)};
      if (a.radius() > 1) continue;
      const DiscPoint2 back = mapping::square_to_disc(mapping::disc_to_square(a));
      err = std::max({err, std::abs(back.x - a.x), std::abs(back.y - a.y)});
    }
    checks.push_back({"squarify-round-trip", err < 1e-9, "max error " + std::to_string(err)});
  }
  return checks;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Radiance texture baking and rendering", "radtex"};
  app.require_subcommand(1);

  // bake
  auto* bake_cmd = app.add_subcommand("bake", "Bake a radiance atlas for the scene's patch");
  std::string scene_path, out_path, grid = "16x16", mode = "mirror", texel = "f32", codec_name = "none";
  int bucket = 16, max_depth = kDefaultMaxDepth, supersample = 1, bits = 8;
  unsigned threads = 0;
  double interior_depth = 1.0;
  bake_cmd->add_option("--scene", scene_path, "Scene file")->required();
  bake_cmd->add_option("--out", out_path, "Output .radx")->required();
  bake_cmd->add_option("--grid", grid, "Bucket grid WxH");
  bake_cmd->add_option("--bucket", bucket, "Bucket resolution n");
  bake_cmd->add_option("--mode", mode, "mirror|shaded|shadow|interior")
      ->check(CLI::IsMember({"mirror", "shaded", "shadow", "interior"}));
  bake_cmd->add_option("--interior-depth", interior_depth, "Room depth for interior mode");
  bake_cmd->add_option("--texel", texel, "f32|u8")->check(CLI::IsMember({"f32", "u8"}));
  bake_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  bake_cmd->add_option("--max-depth", max_depth, "Mirror recursion depth");
  bake_cmd->add_option("--supersample", supersample, "s x s directions per texel");
  bake_cmd->add_option("--codec", codec_name, "none|lossless|quantized")
      ->check(CLI::IsMember({"none", "lossless", "quantized"}));
  bake_cmd->add_option("--bits", bits, "Bits per texel for --codec quantized");

  // render
  auto* render_cmd = app.add_subcommand("render", "Rasterize a patch carrying an atlas");
  std::string atlas_path, camera_text, res = "256x256", background_text = "0,0,0", patch_scene;
  bool blend = false, pfm = false, nearest_texel = false;
  render_cmd->add_option("--atlas", atlas_path, "Input .radx")->required();
  render_cmd->add_option("--camera", camera_text, "px,py,pz:lx,ly,lz:ux,uy,uz:vfov")->required();
  render_cmd->add_option("--res", res, "Image WxH");
  render_cmd->add_option("--out", out_path, "Output image")->required();
  render_cmd->add_flag("--blend-buckets", blend, "Blend the 4 nearest buckets");
  render_cmd->add_flag("--nearest-texel", nearest_texel, "Nearest texel inside buckets");
  render_cmd->add_flag("--pfm", pfm, "Write linear PFM instead of PPM");
  render_cmd->add_option("--scene", patch_scene, "Take the carrier patch from this scene file");
  render_cmd->add_option("--background", background_text, "Background r,g,b");
  render_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");

  // truth
  auto* truth_cmd = app.add_subcommand("truth", "Ray-trace a reference image");
  truth_cmd->add_option("--scene", scene_path, "Scene file")->required();
  truth_cmd->add_option("--camera", camera_text, "px,py,pz:lx,ly,lz:ux,uy,uz:vfov")->required();
  truth_cmd->add_option("--res", res, "Image WxH");
  truth_cmd->add_option("--out", out_path, "Output image")->required();
  truth_cmd->add_flag("--pfm", pfm, "Write linear PFM instead of PPM");
  truth_cmd->add_option("--max-depth", max_depth, "Mirror recursion depth");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "PSNR between two images");
  std::string a_path, b_path;
  double peak = 1.0;
  compare_cmd->add_option("--a", a_path, "First image")->required();
  compare_cmd->add_option("--b", b_path, "Second image")->required();
  compare_cmd->add_option("--peak", peak, "Peak signal value");

  // inspect
  auto* inspect_cmd = app.add_subcommand("inspect", "Write one bucket as an image");
  std::string bucket_text = "0,0";
  inspect_cmd->add_option("--atlas", atlas_path, "Input .radx")->required();
  inspect_cmd->add_option("--bucket", bucket_text, "BX,BY");
  inspect_cmd->add_option("--out", out_path, "Output image")->required();
  inspect_cmd->add_flag("--pfm", pfm, "Write linear PFM instead of PPM");

  auto* selftest_cmd = app.add_subcommand("selftest", "Run the mapping self checks");

  std::vector<const char*> argv{"radtex"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (bake_cmd->parsed()) {
      const auto [w, h] = parse_dims(grid, "grid");
      const SceneFile file = load_scene(scene_path);
      if (!file.patch) throw ConfigError("scene has no patch directive");
      BakeMode bake_mode = MirrorMode{};
      if (mode == "shaded") bake_mode = ShadedMode{};
      if (mode == "shadow") bake_mode = ShadowMaskMode{};
      if (mode == "interior") {
        InteriorMode interior;
        interior.depth = interior_depth;
        bake_mode = interior;
      }
      BakeOptions options;
      options.texel = texel == "u8" ? TexelKind::kU8 : TexelKind::kF32;
      options.threads = threads;
      options.max_depth = max_depth;
      options.supersample = supersample;
      const RadianceAtlas atlas = bake(file.scene, *file.patch, w, h, bucket, bake_mode, options);
      if (codec_name == "none") {
        write_atlas(atlas, out_path);
      } else {
        const EncodedAtlas encoded =
            codec_name == "lossless" ? codec::encode_lossless(atlas) : codec::encode_quantized(atlas, bits);
        const auto bytes = codec::serialize(encoded);
        std::ofstream file_out(out_path, std::ios::binary);
        if (!file_out) throw IoError("cannot open '" + out_path + "' for writing");
        file_out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!file_out) throw IoError("failed writing '" + out_path + "'");
      }
    } else if (render_cmd->parsed()) {
      const Camera camera = parse_camera(camera_text, res);
      const RadianceAtlas atlas = read_atlas(atlas_path);
      SurfacePatch patch = SurfacePatch::from_axes({-0.5, -0.5, 0}, {1, 0, 0}, {0, 1, 0}, 1, 1);
      if (!patch_scene.empty()) {
        const SceneFile file = load_scene(patch_scene);
        if (!file.patch) throw ConfigError("scene has no patch directive");
        patch = *file.patch;
      }
      RasterOptions options;
      options.threads = threads;
      options.sampling.bucket = blend ? BucketFilter::kBlend : BucketFilter::kNearest;
      options.sampling.texel = nearest_texel ? TexelFilter::kNearest : TexelFilter::kBilinear;
      const Image image = rasterize(make_patch_quad(patch), atlas, camera,
                                    parse_vec3(background_text, "background"), options);
      write_image(image, out_path, pfm);
    } else if (truth_cmd->parsed()) {
      const Camera camera = parse_camera(camera_text, res);
      const SceneFile file = load_scene(scene_path);
      write_image(ground_truth(file.scene, camera, max_depth), out_path, pfm);
    } else if (compare_cmd->parsed()) {
      const double db = psnr(read_image(a_path), read_image(b_path), peak);
      out << "psnr_db=" << (std::isinf(db) ? std::string("inf") : std::to_string(db)) << "\n";
    } else if (inspect_cmd->parsed()) {
      const auto b = split_numbers(bucket_text, ',', 2, "bucket");
      const RadianceAtlas atlas = read_atlas(atlas_path);
      const Image image = bucket_image(atlas, {static_cast<int>(b[0]), static_cast<int>(b[1])});
      write_image(image, out_path, pfm);
    } else if (selftest_cmd->parsed()) {
      bool all = true;
      for (const Check& c : run_selftest()) {
        out << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
        all = all && c.pass;
      }
      return all ? kOk : kValidation;
    }
  } catch (const UsageError& e) {
    err << "radtex: " << e.what() << "\n";
    return kUsage;
  } catch (const FormatError& e) {
    err << "radtex: " << e.what() << "\n";
    return kFileFormat;
  } catch (const IoError& e) {
    err << "radtex: " << e.what() << "\n";
    return kFileFormat;
  } catch (const ConfigError& e) {
    err << "radtex: " << e.what() << "\n";
    return kValidation;
  } catch (const DomainError& e) {
    err << "radtex: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace radtex::cli
