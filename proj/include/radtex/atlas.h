#pragma once

// Radiance atlas: a w x h matrix of n x n hemispherical buckets laid out as
// one (w*n) x (h*n) texel grid. Surface uv selects the bucket; the incidence
// direction selects the position inside it.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "radtex/image.h"
#include "radtex/mapping.h"
#include "radtex/vec.h"

namespace radtex {

enum class TexelKind : uint32_t {
  kU8 = 0,
  kF32 = 1,
  kMask = 2,
};

const char* to_string(TexelKind kind);

struct AtlasHeader {
  uint32_t width_buckets = 1;
  uint32_t height_buckets = 1;
  uint32_t bucket_res = 2;
  uint32_t channels = 3;
  TexelKind kind = TexelKind::kF32;

  // Throws ConfigError on a header that cannot describe an atlas.
  void validate() const;

  std::size_t grid_width() const { return std::size_t{width_buckets} * bucket_res; }
  std::size_t grid_height() const { return std::size_t{height_buckets} * bucket_res; }
  // Number of scalar values (texels * channels).
  std::size_t value_count() const { return grid_width() * grid_height() * channels; }

  bool operator==(const AtlasHeader&) const = default;
};

struct BucketIndex {
  int bx = 0;
  int by = 0;
  bool operator==(const BucketIndex&) const = default;
};

struct LocalTexel {
  int lx = 0;
  int ly = 0;
  bool operator==(const LocalTexel&) const = default;
};

// Texel values are held as floats for every kind. U8 values are kept on the
// k/255 lattice and mask values in {0, 1}, so the in-memory form maps to the
// file form without loss.
class RadianceAtlas {
 public:
  explicit RadianceAtlas(const AtlasHeader& header);
  // Throws ConfigError if values does not match the header or violates the kind.
  RadianceAtlas(const AtlasHeader& header, std::vector<float> values);

  const AtlasHeader& header() const { return header_; }
  std::span<const float> values() const { return values_; }

  float value(std::size_t flat) const { return values_[flat]; }
  // Stores v after quantizing it for the atlas kind.
  void set_value(std::size_t flat, float v);

  // Single-channel atlases replicate their value into r, g and b.
  Rgb texel(BucketIndex b, LocalTexel t) const;
  void set_texel(BucketIndex b, LocalTexel t, const Rgb& value);

  bool operator==(const RadianceAtlas&) const = default;

 private:
  AtlasHeader header_;
  std::vector<float> values_;
};

// Storage quantization for a kind: u8 rounds to k/255 after clamping to [0,1];
// mask thresholds at 0.5.
float quantize_texel(TexelKind kind, float v);

// Half-open cells; u == 1 lands in the last bucket. Throws DomainError outside [0,1].
BucketIndex bucket_of_uv(double u, double v, const AtlasHeader& header);

// Index of the first channel of a texel in the flat value array.
std::size_t global_texel(BucketIndex b, LocalTexel t, const AtlasHeader& header);
// Inverse of global_texel.
std::pair<BucketIndex, LocalTexel> texel_of_global(std::size_t flat, const AtlasHeader& header);

// Centered coordinate of texel k's center along one axis: (k + 0.5) * 2 / n - 1.
double texel_center(int k, int bucket_res);

enum class TexelFilter { kNearest, kBilinear };
enum class BucketFilter { kNearest, kBlend };

struct SampleOptions {
  BucketFilter bucket = BucketFilter::kNearest;
  TexelFilter texel = TexelFilter::kBilinear;
};

// Filtered read inside one bucket. coord should already be clamped with
// clamp_bucket_coord; reads never leave bucket b.
Rgb sample_bucket(const RadianceAtlas& atlas, BucketIndex b, SquarePoint2 coord,
                  TexelFilter filter = TexelFilter::kBilinear);

// The plenoptic lookup L(u, v, i) with i in tangent space.
Rgb sample_plenoptic(const RadianceAtlas& atlas, double u, double v, const UnitDir3& i,
                     const SampleOptions& options = {});

// RADX container.
std::vector<unsigned char> serialize(const RadianceAtlas& atlas);
RadianceAtlas deserialize(std::span<const unsigned char> bytes);

void write_atlas(const RadianceAtlas& atlas, const std::filesystem::path& path);
RadianceAtlas read_atlas(const std::filesystem::path& path);

// Whole texel grid as an image: one pixel per texel.
Image mosaic_image(const RadianceAtlas& atlas);
// One bucket as an n x n image.
Image bucket_image(const RadianceAtlas& atlas, BucketIndex b);
// PFM for float atlases, PPM otherwise.
void export_mosaic(const RadianceAtlas& atlas, const std::filesystem::path& path);

}  // namespace radtex
