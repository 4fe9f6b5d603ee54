#pragma once

// Inter-bucket compression. Neighboring buckets hold nearly the same
// hemisphere, so each bucket is predicted from the bucket to its left at the
// same local texel (first column: from the bucket above; bucket (0,0): from
// zero) and only the residuals are coded.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "radtex/atlas.h"

namespace radtex {

enum class CodecId : uint32_t {
  kLossless = 1,
  kQuantized = 2,
};

struct EncodedAtlas {
  AtlasHeader header;
  CodecId codec = CodecId::kLossless;
  // Bits per texel for kQuantized; 0 for kLossless.
  uint32_t param = 0;
  std::vector<unsigned char> payload;
};

namespace codec {

// Bytes the raw texel payload of a RADX file occupies for this header.
std::size_t raw_payload_size(const AtlasHeader& header);

EncodedAtlas encode_lossless(const RadianceAtlas& atlas);
// Per-bucket min/max plus `bits`-bit codes. Float atlases only; bits in [2, 8].
EncodedAtlas encode_quantized(const RadianceAtlas& atlas, int bits);
RadianceAtlas decode(const EncodedAtlas& encoded);

// Signed prediction residuals in coding order (before zig-zag mapping). Float
// residuals are differences of the IEEE bit patterns, wrapped to 32 bits.
// Not defined for mask atlases.
std::vector<int64_t> prediction_residuals(const RadianceAtlas& atlas);

// Worst-case absolute error of encode_quantized for a bucket spanning [lo, hi].
double quantization_bound(double lo, double hi, int bits);

// RADX file carrying an encoded section instead of raw texels.
std::vector<unsigned char> serialize(const EncodedAtlas& encoded);

}  // namespace codec
}  // namespace radtex
