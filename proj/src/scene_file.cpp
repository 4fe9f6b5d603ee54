#include "radtex/scene_file.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "radtex/errors.h"

namespace radtex {

namespace {

class LineParser {
 public:
  LineParser(std::vector<std::string> tokens, int line) : tokens_(std::move(tokens)), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("scene line " + std::to_string(line_) + ": " + msg);
  }

  void expect_count(std::size_t n) const {
    if (tokens_.size() != n) {
      fail("'" + tokens_[0] + "' expects " + std::to_string(n - 1) + " arguments, got " +
           std::to_string(tokens_.size() - 1));
    }
  }

  const std::string& token(std::size_t k) const { return tokens_[k]; }

  double number(std::size_t k) const {
    const std::string& s = tokens_[k];
    double v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) fail("'" + s + "' is not a number");
    if (!std::isfinite(v)) fail("'" + s + "' is not finite");
    return v;
  }

  Vec3 vec(std::size_t k) const { return {number(k), number(k + 1), number(k + 2)}; }

 private:
  std::vector<std::string> tokens_;
  int line_;
};

}  // namespace

SceneFile parse_scene(std::string_view text) {
  SceneFile out;
  std::map<std::string, int> materials;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  int patches = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> tokens;
    for (std::string w; words >> w;) tokens.push_back(w);
    if (tokens.empty()) continue;
    const LineParser p(tokens, line_no);
    const std::string& kind = tokens[0];

    const auto material_ref = [&](std::size_t k) {
      const auto it = materials.find(p.token(k));
      if (it == materials.end()) p.fail("material '" + p.token(k) + "' is not defined");
      return it->second;
    };

    if (kind == "mat") {
      p.expect_count(6);
      Material m;
      if (p.token(2) == "lambert") {
        m.type = Material::Type::kLambert;
      } else if (p.token(2) == "mirror") {
        m.type = Material::Type::kMirror;
      } else {
        p.fail("unknown material type '" + p.token(2) + "'");
      }
      m.color = p.vec(3);
      if (materials.count(p.token(1))) p.fail("material '" + p.token(1) + "' defined twice");
      materials[p.token(1)] = static_cast<int>(out.scene.materials.size());
      out.scene.materials.push_back(m);
    } else if (kind == "sphere") {
      p.expect_count(6);
      const double r = p.number(4);
      if (!(r > 0)) p.fail("sphere radius must be positive");
      out.scene.primitives.push_back({Sphere{p.vec(1), r}, material_ref(5)});
    } else if (kind == "plane") {
      p.expect_count(8);
      const Vec3 n = p.vec(4);
      if (!(length(n) > 0)) p.fail("plane normal must be non-zero");
      out.scene.primitives.push_back({Plane{p.vec(1), normalize(n)}, material_ref(7)});
    } else if (kind == "box") {
      p.expect_count(8);
      const Box b{p.vec(1), p.vec(4)};
      if (!(b.min.x < b.max.x && b.min.y < b.max.y && b.min.z < b.max.z)) p.fail("box min must be below max");
      out.scene.primitives.push_back({b, material_ref(7)});
    } else if (kind == "light") {
      p.expect_count(7);
      out.scene.lights.push_back({p.vec(1), p.vec(4)});
    } else if (kind == "env") {
      p.expect_count(2);
      if (p.token(1) != "default") p.fail("only 'env default' is supported");
      out.scene.environment = Environment{};
    } else if (kind == "patch") {
      p.expect_count(12);
      if (++patches > 1) p.fail("only one patch per scene");
      try {
        out.patch = SurfacePatch::from_axes(p.vec(1), p.vec(4), p.vec(7), p.number(10), p.number(11));
      } catch (const ConfigError& e) {
        p.fail(e.what());
      }
    } else {
      p.fail("unknown directive '" + kind + "'");
    }
  }
  out.scene.validate();
  return out;
}

SceneFile load_scene(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scene '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scene(text.str());
}

}  // namespace radtex
