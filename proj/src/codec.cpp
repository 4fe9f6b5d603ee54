#include "radtex/codec.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "byte_io.h"
#include "radtex/errors.h"

namespace radtex::codec {

namespace {

using detail::ByteReader;
using detail::ByteWriter;

uint32_t zigzag(int64_t v) { return static_cast<uint32_t>((v << 1) ^ (v >> 63)); }
int64_t unzigzag(uint32_t v) { return static_cast<int64_t>(v >> 1) ^ -static_cast<int64_t>(v & 1); }

// Integer symbol of a stored value: the u8 code or the IEEE bit pattern.
uint32_t symbol_of(TexelKind kind, float v) {
  if (kind == TexelKind::kU8) return static_cast<uint32_t>(std::lround(v * 255.0f));
  return std::bit_cast<uint32_t>(v);
}

float value_of(TexelKind kind, uint32_t s) {
  if (kind == TexelKind::kU8) return static_cast<float>(s) / 255.0f;
  return std::bit_cast<float>(s);
}

// Visits every value in coding order: buckets row-major, then texels
// row-major inside the bucket, then channels. `pred` is the flat index of the
// predicting value, or -1 for the zero predictor.
template <typename Fn>
void for_each_in_coding_order(const AtlasHeader& h, Fn&& fn) {
  const int n = static_cast<int>(h.bucket_res);
  const int channels = static_cast<int>(h.channels);
  for (int by = 0; by < static_cast<int>(h.height_buckets); ++by) {
    for (int bx = 0; bx < static_cast<int>(h.width_buckets); ++bx) {
      for (int ly = 0; ly < n; ++ly) {
        for (int lx = 0; lx < n; ++lx) {
          const std::size_t flat = global_texel({bx, by}, {lx, ly}, h);
          std::ptrdiff_t pred = -1;
          if (bx > 0) {
            pred = static_cast<std::ptrdiff_t>(global_texel({bx - 1, by}, {lx, ly}, h));
          } else if (by > 0) {
            pred = static_cast<std::ptrdiff_t>(global_texel({bx, by - 1}, {lx, ly}, h));
          }
          for (int c = 0; c < channels; ++c) fn(flat + c, pred < 0 ? pred : pred + c);
        }
      }
    }
  }
}

int64_t residual(TexelKind kind, uint32_t actual, uint32_t predicted) {
  if (kind == TexelKind::kU8) return static_cast<int64_t>(actual) - static_cast<int64_t>(predicted);
  return static_cast<int32_t>(actual - predicted);
}

uint32_t apply_residual(TexelKind kind, uint32_t predicted, int64_t r) {
  if (kind == TexelKind::kU8) {
    const int64_t v = static_cast<int64_t>(predicted) + r;
    if (v < 0 || v > 255) throw FormatError(FormatError::Kind::kCodec, "u8 residual out of range");
    return static_cast<uint32_t>(v);
  }
  return predicted + static_cast<uint32_t>(static_cast<int32_t>(r));
}

// Run/literal packing: each token starts with varint (len << 1 | is_run). A
// run is followed by one varint symbol, a literal block by `len` symbols.
void pack_symbols(const std::vector<uint32_t>& symbols, ByteWriter& out) {
  std::size_t k = 0;
  std::size_t literal_start = 0;
  const auto flush_literals = [&](std::size_t end) {
    if (end == literal_start) return;
    out.varint((end - literal_start) << 1);
    for (std::size_t j = literal_start; j < end; ++j) out.varint(symbols[j]);
  };
  while (k < symbols.size()) {
    std::size_t run = 1;
    while (k + run < symbols.size() && symbols[k + run] == symbols[k]) ++run;
    if (run >= 2) {
      flush_literals(k);
      out.varint((run << 1) | 1);
      out.varint(symbols[k]);
      k += run;
      literal_start = k;
    } else {
      ++k;
    }
  }
  flush_literals(symbols.size());
}

std::vector<uint32_t> unpack_symbols(ByteReader& in, std::size_t count) {
  std::vector<uint32_t> symbols;
  symbols.reserve(count);
  while (symbols.size() < count) {
    const uint64_t token = in.varint();
    const uint64_t len = token >> 1;
    if (len == 0 || len > count - symbols.size()) {
      throw FormatError(FormatError::Kind::kCodec, "corrupt run length in codec payload");
    }
    if (token & 1) {
      const uint64_t s = in.varint();
      symbols.insert(symbols.end(), static_cast<std::size_t>(len), static_cast<uint32_t>(s));
    } else {
      for (uint64_t j = 0; j < len; ++j) symbols.push_back(static_cast<uint32_t>(in.varint()));
    }
  }
  return symbols;
}

// Masks: first bit value, then alternating run lengths over the global grid.
void encode_mask(const RadianceAtlas& atlas, ByteWriter& out) {
  const auto values = atlas.values();
  out.u8(values[0] != 0.0f ? 1 : 0);
  std::size_t k = 0;
  while (k < values.size()) {
    std::size_t run = 1;
    while (k + run < values.size() && values[k + run] == values[k]) ++run;
    out.varint(run);
    k += run;
  }
}

std::vector<float> decode_mask(const AtlasHeader& h, ByteReader& in) {
  std::vector<float> values;
  values.reserve(h.value_count());
  float bit = in.u8() ? 1.0f : 0.0f;
  while (values.size() < h.value_count()) {
    const uint64_t run = in.varint();
    if (run == 0 || run > h.value_count() - values.size()) {
      throw FormatError(FormatError::Kind::kCodec, "corrupt mask run length");
    }
    values.insert(values.end(), static_cast<std::size_t>(run), bit);
    bit = 1.0f - bit;
  }
  return values;
}

}  // namespace

std::size_t raw_payload_size(const AtlasHeader& h) {
  switch (h.kind) {
    case TexelKind::kU8:
      return h.value_count();
    case TexelKind::kF32:
      return h.value_count() * 4;
    case TexelKind::kMask:
      return h.grid_height() * ((h.grid_width() + 7) / 8);
  }
  return 0;
}

std::vector<int64_t> prediction_residuals(const RadianceAtlas& atlas) {
  const AtlasHeader& h = atlas.header();
  if (h.kind == TexelKind::kMask) throw ConfigError("mask atlases are run-length coded without prediction");
  std::vector<int64_t> out;
  out.reserve(h.value_count());
  for_each_in_coding_order(h, [&](std::size_t flat, std::ptrdiff_t pred) {
    const uint32_t actual = symbol_of(h.kind, atlas.value(flat));
    const uint32_t predicted = pred < 0 ? 0u : symbol_of(h.kind, atlas.value(static_cast<std::size_t>(pred)));
    out.push_back(residual(h.kind, actual, predicted));
  });
  return out;
}

EncodedAtlas encode_lossless(const RadianceAtlas& atlas) {
  EncodedAtlas encoded{atlas.header(), CodecId::kLossless, 0, {}};
  ByteWriter out;
  if (atlas.header().kind == TexelKind::kMask) {
    encode_mask(atlas, out);
  } else {
    const auto residuals = prediction_residuals(atlas);
    std::vector<uint32_t> symbols(residuals.size());
    std::transform(residuals.begin(), residuals.end(), symbols.begin(), zigzag);
    pack_symbols(symbols, out);
  }
  encoded.payload = std::move(out.bytes());
  return encoded;
}

double quantization_bound(double lo, double hi, int bits) {
  return (hi - lo) / static_cast<double>((1u << bits) - 1) / 2.0;
}

EncodedAtlas encode_quantized(const RadianceAtlas& atlas, int bits) {
  const AtlasHeader& h = atlas.header();
  if (h.kind != TexelKind::kF32) throw ConfigError("quantized coding needs a float atlas");
  if (bits < 2 || bits > 8) throw ConfigError("quantization bits must be in [2, 8], got " + std::to_string(bits));
  const uint32_t levels = (1u << bits) - 1;
  const int n = static_cast<int>(h.bucket_res);
  const int channels = static_cast<int>(h.channels);

  // Per bucket: lo f32, hi f32, then LSB-first packed codes padded to a byte.
  ByteWriter out;
  uint64_t acc = 0;
  int acc_bits = 0;
  std::vector<float> bucket;
  for (int by = 0; by < static_cast<int>(h.height_buckets); ++by) {
    for (int bx = 0; bx < static_cast<int>(h.width_buckets); ++bx) {
      bucket.clear();
      for (int ly = 0; ly < n; ++ly) {
        for (int lx = 0; lx < n; ++lx) {
          const std::size_t flat = global_texel({bx, by}, {lx, ly}, h);
          for (int c = 0; c < channels; ++c) bucket.push_back(atlas.value(flat + c));
        }
      }
      const auto [lo_it, hi_it] = std::minmax_element(bucket.begin(), bucket.end());
      const float lo = *lo_it;
      const float hi = *hi_it;
      if (!std::isfinite(lo) || !std::isfinite(hi)) throw ConfigError("cannot quantize non-finite texels");
      out.u32(std::bit_cast<uint32_t>(lo));
      out.u32(std::bit_cast<uint32_t>(hi));
      const double range = static_cast<double>(hi) - lo;
      for (float v : bucket) {
        const uint32_t q =
            range > 0 ? static_cast<uint32_t>(std::lround((static_cast<double>(v) - lo) / range * levels)) : 0u;
        acc |= static_cast<uint64_t>(q) << acc_bits;
        acc_bits += bits;
        while (acc_bits >= 8) {
          out.u8(static_cast<uint8_t>(acc));
          acc >>= 8;
          acc_bits -= 8;
        }
      }
      if (acc_bits > 0) out.u8(static_cast<uint8_t>(acc));
      acc = 0;
      acc_bits = 0;
    }
  }
  return {h, CodecId::kQuantized, static_cast<uint32_t>(bits), std::move(out.bytes())};
}

namespace {

RadianceAtlas decode_quantized(const EncodedAtlas& encoded) {
  const AtlasHeader& h = encoded.header;
  const int bits = static_cast<int>(encoded.param);
  if (h.kind != TexelKind::kF32 || bits < 2 || bits > 8) {
    throw FormatError(FormatError::Kind::kCodec, "invalid quantized codec parameters");
  }
  const uint32_t levels = (1u << bits) - 1;
  const int n = static_cast<int>(h.bucket_res);
  const int channels = static_cast<int>(h.channels);

  // Per bucket: lo f32, hi f32, then LSB-first packed codes padded to a byte.
  ByteReader in(encoded.payload);
  std::vector<float> values(h.value_count());
  for (int by = 0; by < static_cast<int>(h.height_buckets); ++by) {
    for (int bx = 0; bx < static_cast<int>(h.width_buckets); ++bx) {
      uint64_t acc = 0;
      int acc_bits = 0;
      const float lo = std::bit_cast<float>(in.u32());
      const float hi = std::bit_cast<float>(in.u32());
      const double range = static_cast<double>(hi) - lo;
      for (int ly = 0; ly < n; ++ly) {
        for (int lx = 0; lx < n; ++lx) {
          const std::size_t flat = global_texel({bx, by}, {lx, ly}, h);
          for (int c = 0; c < channels; ++c) {
            while (acc_bits < bits) {
              acc |= static_cast<uint64_t>(in.u8()) << acc_bits;
              acc_bits += 8;
            }
            const uint32_t q = static_cast<uint32_t>(acc & levels);
            acc >>= bits;
            acc_bits -= bits;
            values[flat + c] = static_cast<float>(lo + range * q / levels);
          }
        }
      }
    }
  }
  return RadianceAtlas(h, std::move(values));
}

}  // namespace

RadianceAtlas decode(const EncodedAtlas& encoded) {
  const AtlasHeader& h = encoded.header;
  try {
    h.validate();
  } catch (const ConfigError& e) {
    throw FormatError(FormatError::Kind::kCodec, std::string("invalid encoded header: ") + e.what());
  }
  switch (encoded.codec) {
    case CodecId::kLossless: {
      ByteReader in(encoded.payload);
      if (h.kind == TexelKind::kMask) return RadianceAtlas(h, decode_mask(h, in));
      const auto symbols = unpack_symbols(in, h.value_count());
      std::vector<float> values(h.value_count());
      std::vector<uint32_t> decoded(h.value_count());
      std::size_t k = 0;
      for_each_in_coding_order(h, [&](std::size_t flat, std::ptrdiff_t pred) {
        const uint32_t predicted = pred < 0 ? 0u : decoded[static_cast<std::size_t>(pred)];
        decoded[flat] = apply_residual(h.kind, predicted, unzigzag(symbols[k++]));
        values[flat] = value_of(h.kind, decoded[flat]);
      });
      return RadianceAtlas(h, std::move(values));
    }
    case CodecId::kQuantized:
      return decode_quantized(encoded);
  }
  throw FormatError(FormatError::Kind::kCodec, "unknown codec id " + std::to_string(static_cast<uint32_t>(encoded.codec)));
}

std::vector<unsigned char> serialize(const EncodedAtlas& encoded) {
  ByteWriter out;
  detail::write_container_header(encoded.header, out);
  out.u64(0);
  out.u32(static_cast<uint32_t>(encoded.codec));
  out.u32(encoded.param);
  out.u64(encoded.payload.size());
  out.raw(encoded.payload);
  return std::move(out.bytes());
}

}  // namespace radtex::codec
