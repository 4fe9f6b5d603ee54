#include "radtex/image.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cctype>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "radtex/errors.h"

namespace radtex {

Image::Image(int w, int h, int c)
    : width(w), height(h), channels(c), data(static_cast<std::size_t>(w) * h * c, 0.0f) {}

float srgb_encode(float linear) {
  const float v = std::clamp(linear, 0.0f, 1.0f);
  return v <= 0.0031308f ? 12.92f * v : 1.055f * std::pow(v, 1.0f / 2.4f) - 0.055f;
}

float srgb_decode(float encoded) {
  const float v = std::clamp(encoded, 0.0f, 1.0f);
  return v <= 0.04045f ? v / 12.92f : std::pow((v + 0.055f) / 1.055f, 2.4f);
}

unsigned char to_srgb8(float linear) {
  return static_cast<unsigned char>(std::lround(srgb_encode(linear) * 255.0f));
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string token;
  char ch;
  while (in.get(ch)) {
    if (ch == '#') {
      std::string skip;
      std::getline(in, skip);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(ch);
  }
  return token;
}

int parse_dim(const std::string& token, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(token, &used);
    if (used == token.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  throw FormatError(FormatError::Kind::kOther, "bad image dimension '" + token + "' in " + path.string());
}

}  // namespace

void write_ppm(const Image& image, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(image.width) * 3);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < 3; ++c) {
        row[x * 3 + c] = to_srgb8(image.at(x, y, image.channels == 1 ? 0 : c));
      }
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
  finish(out, path);
}

void write_pfm(const Image& image, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << (image.channels == 1 ? "Pf" : "PF") << "\n" << image.width << " " << image.height << "\n-1.0\n";
  const std::size_t row_values = static_cast<std::size_t>(image.width) * image.channels;
  std::vector<unsigned char> bytes(row_values * 4);
  for (int y = image.height - 1; y >= 0; --y) {
    for (std::size_t k = 0; k < row_values; ++k) {
      const uint32_t bits = std::bit_cast<uint32_t>(image.data[static_cast<std::size_t>(y) * row_values + k]);
      for (int b = 0; b < 4; ++b) bytes[k * 4 + b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  finish(out, path);
}

Image read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  const std::string magic = header_token(in);
  if (magic != "P6" && magic != "PF" && magic != "Pf") {
    throw FormatError(FormatError::Kind::kBadMagic, "unsupported image magic '" + magic + "' in " + path.string());
  }
  const int w = parse_dim(header_token(in), path);
  const int h = parse_dim(header_token(in), path);
  const std::string third = header_token(in);

  if (magic == "P6") {
    if (third != "255") throw FormatError(FormatError::Kind::kOther, "only maxval 255 PPM is supported");
    Image image(w, h, 3);
    std::vector<unsigned char> bytes(image.data.size());
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw FormatError(FormatError::Kind::kTruncated, "truncated PPM " + path.string());
    }
    for (std::size_t k = 0; k < bytes.size(); ++k) image.data[k] = srgb_decode(bytes[k] / 255.0f);
    return image;
  }

  double scale = 0;
  try {
    scale = std::stod(third);
  } catch (const std::exception&) {
    throw FormatError(FormatError::Kind::kOther, "bad PFM scale in " + path.string());
  }
  if (scale >= 0) throw FormatError(FormatError::Kind::kOther, "big-endian PFM is not supported");
  Image image(w, h, magic == "PF" ? 3 : 1);
  const std::size_t row_values = static_cast<std::size_t>(w) * image.channels;
  std::vector<unsigned char> bytes(row_values * 4);
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
      throw FormatError(FormatError::Kind::kTruncated, "truncated PFM " + path.string());
    }
    for (std::size_t k = 0; k < row_values; ++k) {
      uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<uint32_t>(bytes[k * 4 + b]) << (8 * b);
      image.data[static_cast<std::size_t>(y) * row_values + k] = std::bit_cast<float>(bits);
    }
  }
  return image;
}

}  // namespace radtex
