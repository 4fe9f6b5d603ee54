#include "radtex/atlas.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>

#include "byte_io.h"
#include "radtex/codec.h"
#include "radtex/errors.h"

namespace radtex {

namespace {

constexpr unsigned char kMagic[4] = {'R', 'A', 'D', 'X'};
constexpr uint32_t kVersion = 1;

}  // namespace

const char* to_string(TexelKind kind) {
  switch (kind) {
    case TexelKind::kU8:
      return "u8";
    case TexelKind::kF32:
      return "f32";
    case TexelKind::kMask:
      return "mask";
  }
  return "unknown";
}

void AtlasHeader::validate() const {
  if (width_buckets < 1 || height_buckets < 1) throw ConfigError("atlas must have at least one bucket per axis");
  if (bucket_res < 2) throw ConfigError("bucket resolution must be >= 2");
  if (channels != 1 && channels != 3) throw ConfigError("channels must be 1 or 3");
  if (kind != TexelKind::kU8 && kind != TexelKind::kF32 && kind != TexelKind::kMask) {
    throw ConfigError("unknown texel kind");
  }
  if (kind == TexelKind::kMask && channels != 1) throw ConfigError("mask atlases are single-channel");
  // Keep global indices comfortably inside 32-bit grid coordinates.
  if (grid_width() > (1u << 20) || grid_height() > (1u << 20)) throw ConfigError("atlas grid too large");
}

float quantize_texel(TexelKind kind, float v) {
  switch (kind) {
    case TexelKind::kU8:
      return static_cast<float>(std::lround(std::clamp(v, 0.0f, 1.0f) * 255.0f)) / 255.0f;
    case TexelKind::kMask:
      return v >= 0.5f ? 1.0f : 0.0f;
    case TexelKind::kF32:
      break;
  }
  return v;
}

RadianceAtlas::RadianceAtlas(const AtlasHeader& header) : header_(header) {
  header_.validate();
  values_.assign(header_.value_count(), 0.0f);
}

RadianceAtlas::RadianceAtlas(const AtlasHeader& header, std::vector<float> values)
    : header_(header), values_(std::move(values)) {
  header_.validate();
  if (values_.size() != header_.value_count()) {
    throw ConfigError("atlas value count " + std::to_string(values_.size()) + " does not match header (" +
                      std::to_string(header_.value_count()) + ")");
  }
  if (header_.kind != TexelKind::kF32) {
    for (float v : values_) {
      if (quantize_texel(header_.kind, v) != v) {
        throw ConfigError(std::string("value not representable as a ") + to_string(header_.kind) + " texel");
      }
    }
  }
}

void RadianceAtlas::set_value(std::size_t flat, float v) { values_.at(flat) = quantize_texel(header_.kind, v); }

Rgb RadianceAtlas::texel(BucketIndex b, LocalTexel t) const {
  const std::size_t i = global_texel(b, t, header_);
  if (header_.channels == 1) return {values_[i], values_[i], values_[i]};
  return {values_[i], values_[i + 1], values_[i + 2]};
}

void RadianceAtlas::set_texel(BucketIndex b, LocalTexel t, const Rgb& value) {
  const std::size_t i = global_texel(b, t, header_);
  if (header_.channels == 1) {
    values_[i] = quantize_texel(header_.kind, static_cast<float>(value.x));
    return;
  }
  values_[i] = quantize_texel(header_.kind, static_cast<float>(value.x));
  values_[i + 1] = quantize_texel(header_.kind, static_cast<float>(value.y));
  values_[i + 2] = quantize_texel(header_.kind, static_cast<float>(value.z));
}

BucketIndex bucket_of_uv(double u, double v, const AtlasHeader& header) {
  if (!(u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0)) throw DomainError("uv outside [0,1]^2");
  constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  const int bx = static_cast<int>(std::floor(std::min(u, kBelowOne) * header.width_buckets));
  const int by = static_cast<int>(std::floor(std::min(v, kBelowOne) * header.height_buckets));
  return {std::min(bx, static_cast<int>(header.width_buckets) - 1),
          std::min(by, static_cast<int>(header.height_buckets) - 1)};
}

std::size_t global_texel(BucketIndex b, LocalTexel t, const AtlasHeader& header) {
  const int n = static_cast<int>(header.bucket_res);
  if (b.bx < 0 || b.by < 0 || b.bx >= static_cast<int>(header.width_buckets) ||
      b.by >= static_cast<int>(header.height_buckets)) {
    throw DomainError("bucket index out of range");
  }
  if (t.lx < 0 || t.ly < 0 || t.lx >= n || t.ly >= n) throw DomainError("local texel index out of range");
  const std::size_t gx = static_cast<std::size_t>(b.bx) * n + t.lx;
  const std::size_t gy = static_cast<std::size_t>(b.by) * n + t.ly;
  return (gy * header.grid_width() + gx) * header.channels;
}

std::pair<BucketIndex, LocalTexel> texel_of_global(std::size_t flat, const AtlasHeader& header) {
  if (flat >= header.value_count() || flat % header.channels != 0) throw DomainError("flat index is not a texel start");
  const std::size_t texel = flat / header.channels;
  const std::size_t gx = texel % header.grid_width();
  const std::size_t gy = texel / header.grid_width();
  const std::size_t n = header.bucket_res;
  return {{static_cast<int>(gx / n), static_cast<int>(gy / n)}, {static_cast<int>(gx % n), static_cast<int>(gy % n)}};
}

double texel_center(int k, int bucket_res) { return (k + 0.5) * 2.0 / bucket_res - 1.0; }

namespace {

// Continuous texel position for a centered coordinate: texel k's center is k.
double texel_position(double c, int n) { return (c + 1.0) * 0.5 * n - 0.5; }

int nearest_texel(double c, int n) {
  const int k = static_cast<int>(std::floor((c + 1.0) * 0.5 * n));
  return std::clamp(k, 0, n - 1);
}

}  // namespace

Rgb sample_bucket(const RadianceAtlas& atlas, BucketIndex b, SquarePoint2 coord, TexelFilter filter) {
  const int n = static_cast<int>(atlas.header().bucket_res);
  if (filter == TexelFilter::kNearest) {
    return atlas.texel(b, {nearest_texel(coord.x, n), nearest_texel(coord.y, n)});
  }
  const double px = std::clamp(texel_position(coord.x, n), 0.0, n - 1.0);
  const double py = std::clamp(texel_position(coord.y, n), 0.0, n - 1.0);
  const int x0 = std::min(static_cast<int>(std::floor(px)), n - 1);
  const int y0 = std::min(static_cast<int>(std::floor(py)), n - 1);
  const int x1 = std::min(x0 + 1, n - 1);
  const int y1 = std::min(y0 + 1, n - 1);
  const double fx = px - x0;
  const double fy = py - y0;
  // Skip zero-weight taps so texel-center reads return the stored value exactly.
  Rgb sum;
  const auto tap = [&](int x, int y, double w) {
    if (w != 0.0) sum += atlas.texel(b, {x, y}) * w;
  };
  tap(x0, y0, (1 - fx) * (1 - fy));
  tap(x1, y0, fx * (1 - fy));
  tap(x0, y1, (1 - fx) * fy);
  tap(x1, y1, fx * fy);
  return sum;
}

Rgb sample_plenoptic(const RadianceAtlas& atlas, double u, double v, const UnitDir3& i,
                     const SampleOptions& options) {
  const AtlasHeader& h = atlas.header();
  const BucketIndex nearest = bucket_of_uv(u, v, h);
  const SquarePoint2 coord = mapping::incidence_to_bucket_coord(i, static_cast<int>(h.bucket_res));
  if (options.bucket == BucketFilter::kNearest) return sample_bucket(atlas, nearest, coord, options.texel);

  const double su = std::clamp(u * h.width_buckets - 0.5, 0.0, h.width_buckets - 1.0);
  const double sv = std::clamp(v * h.height_buckets - 0.5, 0.0, h.height_buckets - 1.0);
  const int bx0 = static_cast<int>(std::floor(su));
  const int by0 = static_cast<int>(std::floor(sv));
  const int bx1 = std::min(bx0 + 1, static_cast<int>(h.width_buckets) - 1);
  const int by1 = std::min(by0 + 1, static_cast<int>(h.height_buckets) - 1);
  const double fx = su - bx0;
  const double fy = sv - by0;
  Rgb sum;
  const auto tap = [&](int bx, int by, double w) {
    if (w != 0.0) sum += sample_bucket(atlas, {bx, by}, coord, options.texel) * w;
  };
  tap(bx0, by0, (1 - fx) * (1 - fy));
  tap(bx1, by0, fx * (1 - fy));
  tap(bx0, by1, (1 - fx) * fy);
  tap(bx1, by1, fx * fy);
  return sum;
}

namespace {

void write_raw_payload(const RadianceAtlas& atlas, detail::ByteWriter& out) {
  const AtlasHeader& h = atlas.header();
  const auto values = atlas.values();
  switch (h.kind) {
    case TexelKind::kU8:
      for (float v : values) out.u8(static_cast<uint8_t>(std::lround(v * 255.0f)));
      break;
    case TexelKind::kF32:
      for (float v : values) out.u32(std::bit_cast<uint32_t>(v));
      break;
    case TexelKind::kMask: {
      // MSB-first within each byte; every grid row starts on a byte boundary.
      const std::size_t gw = h.grid_width();
      for (std::size_t y = 0; y < h.grid_height(); ++y) {
        for (std::size_t x0 = 0; x0 < gw; x0 += 8) {
          uint8_t byte = 0;
          for (std::size_t k = 0; k < 8 && x0 + k < gw; ++k) {
            if (values[y * gw + x0 + k] != 0.0f) byte |= static_cast<uint8_t>(0x80u >> k);
          }
          out.u8(byte);
        }
      }
      break;
    }
  }
}

std::vector<float> read_raw_payload(const AtlasHeader& h, std::span<const unsigned char> raw) {
  std::vector<float> values(h.value_count());
  switch (h.kind) {
    case TexelKind::kU8:
      for (std::size_t k = 0; k < values.size(); ++k) values[k] = static_cast<float>(raw[k]) / 255.0f;
      break;
    case TexelKind::kF32:
      for (std::size_t k = 0; k < values.size(); ++k) {
        uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= static_cast<uint32_t>(raw[4 * k + b]) << (8 * b);
        values[k] = std::bit_cast<float>(bits);
      }
      break;
    case TexelKind::kMask: {
      const std::size_t gw = h.grid_width();
      const std::size_t row_bytes = (gw + 7) / 8;
      for (std::size_t y = 0; y < h.grid_height(); ++y) {
        for (std::size_t x = 0; x < gw; ++x) {
          values[y * gw + x] = (raw[y * row_bytes + x / 8] >> (7 - x % 8)) & 1u ? 1.0f : 0.0f;
        }
      }
      break;
    }
  }
  return values;
}

}  // namespace

namespace detail {

void write_container_header(const AtlasHeader& h, ByteWriter& out) {
  out.raw(kMagic);
  out.u32(kVersion);
  out.u32(h.width_buckets);
  out.u32(h.height_buckets);
  out.u32(h.bucket_res);
  out.u32(h.channels);
  out.u32(static_cast<uint32_t>(h.kind));
}

}  // namespace detail

std::vector<unsigned char> serialize(const RadianceAtlas& atlas) {
  detail::ByteWriter out;
  detail::write_container_header(atlas.header(), out);
  out.u64(codec::raw_payload_size(atlas.header()));
  write_raw_payload(atlas, out);
  return std::move(out.bytes());
}

RadianceAtlas deserialize(std::span<const unsigned char> bytes) {
  using Kind = FormatError::Kind;
  detail::ByteReader in(bytes);
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw FormatError(Kind::kBadMagic, "bad magic: not a RADX file");
  }
  in.take(4);
  AtlasHeader h;
  try {
    const uint32_t version = in.u32();
    if (version != kVersion) {
      throw FormatError(Kind::kVersion, "unsupported RADX version " + std::to_string(version));
    }
    h.width_buckets = in.u32();
    h.height_buckets = in.u32();
    h.bucket_res = in.u32();
    h.channels = in.u32();
    h.kind = static_cast<TexelKind>(in.u32());
    try {
      h.validate();
    } catch (const ConfigError& e) {
      throw FormatError(Kind::kOther, std::string("invalid RADX header: ") + e.what());
    }

    const uint64_t raw_len = in.u64();
    const std::size_t expected = codec::raw_payload_size(h);
    if (raw_len == expected) {
      if (in.remaining() < expected) throw FormatError(Kind::kTruncated, "truncated texel payload");
      auto values = read_raw_payload(h, in.take(expected));
      if (in.remaining() != 0) throw FormatError(Kind::kSizeMismatch, "trailing bytes after texel payload");
      return RadianceAtlas(h, std::move(values));
    }
    if (raw_len != 0) {
      throw FormatError(Kind::kSizeMismatch, "payload length " + std::to_string(raw_len) +
                                                 " does not match header (expected " + std::to_string(expected) + ")");
    }

    // Encoded section.
    EncodedAtlas encoded;
    encoded.header = h;
    encoded.codec = static_cast<CodecId>(in.u32());
    encoded.param = in.u32();
    const uint64_t len = in.u64();
    if (in.remaining() < len) throw FormatError(Kind::kTruncated, "truncated codec payload");
    const auto payload = in.take(static_cast<std::size_t>(len));
    encoded.payload.assign(payload.begin(), payload.end());
    if (in.remaining() != 0) throw FormatError(Kind::kSizeMismatch, "trailing bytes after codec payload");
    return codec::decode(encoded);
  } catch (const FormatError& e) {
    if (e.kind() == Kind::kTruncated) throw FormatError(Kind::kTruncated, std::string("truncated RADX: ") + e.what());
    throw;
  }
}

void write_atlas(const RadianceAtlas& atlas, const std::filesystem::path& path) {
  const auto bytes = serialize(atlas);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

RadianceAtlas read_atlas(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

Image mosaic_image(const RadianceAtlas& atlas) {
  const AtlasHeader& h = atlas.header();
  Image image(static_cast<int>(h.grid_width()), static_cast<int>(h.grid_height()), static_cast<int>(h.channels));
  std::copy(atlas.values().begin(), atlas.values().end(), image.data.begin());
  return image;
}

Image bucket_image(const RadianceAtlas& atlas, BucketIndex b) {
  const AtlasHeader& h = atlas.header();
  const int n = static_cast<int>(h.bucket_res);
  const int c = static_cast<int>(h.channels);
  Image image(n, n, c);
  for (int ly = 0; ly < n; ++ly) {
    for (int lx = 0; lx < n; ++lx) {
      const std::size_t flat = global_texel(b, {lx, ly}, h);
      for (int k = 0; k < c; ++k) image.at(lx, ly, k) = atlas.value(flat + k);
    }
  }
  return image;
}

void export_mosaic(const RadianceAtlas& atlas, const std::filesystem::path& path) {
  const Image image = mosaic_image(atlas);
  if (atlas.header().kind == TexelKind::kF32) {
    write_pfm(image, path);
  } else {
    write_ppm(image, path);
  }
}

}  // namespace radtex
