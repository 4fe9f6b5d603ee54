#include "radtex/codec.h"

#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <random>

#include "radtex/errors.h"

namespace radtex {
namespace {

AtlasHeader header(uint32_t w, uint32_t h, uint32_t n, uint32_t channels = 3, TexelKind kind = TexelKind::kF32) {
  return {w, h, n, channels, kind};
}

RadianceAtlas filled(const AtlasHeader& h, auto&& value_at) {
  RadianceAtlas atlas(h);
  for (std::size_t k = 0; k < h.value_count(); ++k) atlas.set_value(k, value_at(k));
  return atlas;
}

RadianceAtlas random_atlas(const AtlasHeader& h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> uni(0.0f, 1.0f);
  return filled(h, [&](std::size_t) { return uni(rng); });
}

// Smooth over the hemisphere and slowly varying across buckets.
RadianceAtlas smooth_atlas(const AtlasHeader& h) {
  RadianceAtlas atlas(h);
  const int n = static_cast<int>(h.bucket_res);
  for (int by = 0; by < static_cast<int>(h.height_buckets); ++by) {
    for (int bx = 0; bx < static_cast<int>(h.width_buckets); ++bx) {
      for (int ly = 0; ly < n; ++ly) {
        for (int lx = 0; lx < n; ++lx) {
          const double v = 0.5 + 0.3 * std::sin(0.4 * lx + 0.1 * bx) * std::cos(0.3 * ly + 0.05 * by);
          atlas.set_texel({bx, by}, {lx, ly}, {v, v * 0.5, 1 - v});
        }
      }
    }
  }
  return atlas;
}

bool bit_equal(const RadianceAtlas& a, const RadianceAtlas& b) {
  if (a.header() != b.header()) return false;
  for (std::size_t k = 0; k < a.header().value_count(); ++k) {
    if (std::bit_cast<uint32_t>(a.value(k)) != std::bit_cast<uint32_t>(b.value(k))) return false;
  }
  return true;
}

TEST(Lossless, ConstantAtlasCompressesBelowFivePercent) {
  const AtlasHeader h = header(4, 4, 8);
  const RadianceAtlas atlas = filled(h, [](std::size_t) { return 0.3f; });
  const EncodedAtlas enc = codec::encode_lossless(atlas);
  EXPECT_LT(enc.payload.size(), codec::raw_payload_size(h) / 20);
  EXPECT_TRUE(bit_equal(codec::decode(enc), atlas));
}

TEST(Lossless, FirstBucketResidualsAreRawValues) {
  const AtlasHeader hf = header(3, 2, 4);
  const RadianceAtlas f = random_atlas(hf, 31);
  const auto rf = codec::prediction_residuals(f);
  // Coding order starts with bucket (0,0), texels row-major, channels innermost.
  std::size_t k = 0;
  for (int ly = 0; ly < 4; ++ly) {
    for (int lx = 0; lx < 4; ++lx) {
      const std::size_t flat = global_texel({0, 0}, {lx, ly}, hf);
      for (int c = 0; c < 3; ++c, ++k) {
        EXPECT_EQ(rf[k], static_cast<int32_t>(std::bit_cast<uint32_t>(f.value(flat + c))));
      }
    }
  }

  const AtlasHeader hb = header(2, 2, 3, 1, TexelKind::kU8);
  const RadianceAtlas b = random_atlas(hb, 32);
  const auto rb = codec::prediction_residuals(b);
  for (int t = 0; t < 9; ++t) {
    EXPECT_EQ(rb[t], std::lround(b.value(global_texel({0, 0}, {t % 3, t / 3}, hb)) * 255.0f));
  }
}

TEST(Lossless, PredictsFromLeftThenAbove) {
  const AtlasHeader h = header(2, 2, 2, 1, TexelKind::kU8);
  RadianceAtlas atlas(h);
  // Bucket values: (0,0)=10, (1,0)=12, (0,1)=15, (1,1)=15 on every texel.
  const int codes[2][2] = {{10, 12}, {15, 15}};
  for (int by = 0; by < 2; ++by) {
    for (int bx = 0; bx < 2; ++bx) {
      for (int t = 0; t < 4; ++t) {
        const double v = codes[by][bx] / 255.0;
        atlas.set_texel({bx, by}, {t % 2, t / 2}, {v, v, v});
      }
    }
  }
  const auto r = codec::prediction_residuals(atlas);
  ASSERT_EQ(r.size(), 16u);
  for (int t = 0; t < 4; ++t) {
    EXPECT_EQ(r[t], 10);
    EXPECT_EQ(r[4 + t], 2);
    EXPECT_EQ(r[8 + t], 5);
    EXPECT_EQ(r[12 + t], 0);
  }
}

TEST(Lossless, RandomAtlasesRoundTripForEveryKind) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 4; ++trial) {
    const RadianceAtlas f = filled(header(3, 4, 5), [&](std::size_t) {
      return std::bit_cast<float>(static_cast<uint32_t>(rng()) & 0xff7fffffu);
    });
    EXPECT_TRUE(bit_equal(codec::decode(codec::encode_lossless(f)), f));
    const RadianceAtlas u8 = random_atlas(header(4, 3, 3, 3, TexelKind::kU8), rng());
    EXPECT_TRUE(bit_equal(codec::decode(codec::encode_lossless(u8)), u8));
    const RadianceAtlas mask = random_atlas(header(5, 2, 3, 1, TexelKind::kMask), rng());
    EXPECT_TRUE(bit_equal(codec::decode(codec::encode_lossless(mask)), mask));
    const RadianceAtlas gray = random_atlas(header(2, 2, 4, 1), rng());
    EXPECT_TRUE(bit_equal(codec::decode(codec::encode_lossless(gray)), gray));
  }
}

TEST(Lossless, MasksAreRunLengthCoded) {
  const AtlasHeader h = header(8, 8, 8, 1, TexelKind::kMask);
  const RadianceAtlas ones = filled(h, [](std::size_t) { return 1.0f; });
  const EncodedAtlas enc = codec::encode_lossless(ones);
  EXPECT_LE(enc.payload.size(), 4u);
  EXPECT_THROW(codec::prediction_residuals(ones), ConfigError);
}

TEST(Lossless, PayloadShrinksWithInterBucketSimilarity) {
  const AtlasHeader h = header(8, 8, 8);
  const auto constant = codec::encode_lossless(filled(h, [](std::size_t) { return 0.7f; })).payload.size();
  const auto smooth = codec::encode_lossless(smooth_atlas(h)).payload.size();
  const auto noisy = codec::encode_lossless(random_atlas(h, 34)).payload.size();
  EXPECT_LE(constant, smooth);
  EXPECT_LE(smooth, noisy);
}

TEST(Quantized, ConstantBucketIsExact) {
  const RadianceAtlas atlas = filled(header(2, 2, 4), [](std::size_t) { return 0.123f; });
  for (int bits = 2; bits <= 8; ++bits) {
    EXPECT_TRUE(bit_equal(codec::decode(codec::encode_quantized(atlas, bits)), atlas));
  }
}

TEST(Quantized, LinearRampWithinHalfStep) {
  const AtlasHeader h = header(1, 1, 16, 1);
  const RadianceAtlas ramp = filled(h, [](std::size_t k) { return static_cast<float>(k) / 255.0f * 0.8f; });
  const RadianceAtlas back = codec::decode(codec::encode_quantized(ramp, 8));
  const double bound = codec::quantization_bound(0.0, 0.8, 8);
  for (std::size_t k = 0; k < h.value_count(); ++k) {
    ASSERT_LE(std::abs(back.value(k) - ramp.value(k)), bound + 1e-7) << k;
  }
}

TEST(Quantized, ErrorBoundHoldsExhaustively) {
  const AtlasHeader h = header(8, 8, 8);
  const RadianceAtlas atlas = random_atlas(h, 35);
  for (int bits = 2; bits <= 8; ++bits) {
    const RadianceAtlas back = codec::decode(codec::encode_quantized(atlas, bits));
    for (int by = 0; by < 8; ++by) {
      for (int bx = 0; bx < 8; ++bx) {
        float lo = 1e30f, hi = -1e30f;
        for (int t = 0; t < 64; ++t) {
          const std::size_t flat = global_texel({bx, by}, {t % 8, t / 8}, h);
          for (int c = 0; c < 3; ++c) {
            lo = std::min(lo, atlas.value(flat + c));
            hi = std::max(hi, atlas.value(flat + c));
          }
        }
        const double bound = codec::quantization_bound(lo, hi, bits) + 1e-7;
        for (int t = 0; t < 64; ++t) {
          const std::size_t flat = global_texel({bx, by}, {t % 8, t / 8}, h);
          for (int c = 0; c < 3; ++c) ASSERT_LE(std::abs(back.value(flat + c) - atlas.value(flat + c)), bound);
        }
      }
    }
  }
}

TEST(Quantized, FewerBitsSmallerPayloadLargerError) {
  const RadianceAtlas atlas = random_atlas(header(4, 4, 8), 36);
  const EncodedAtlas coarse = codec::encode_quantized(atlas, 2);
  const EncodedAtlas fine = codec::encode_quantized(atlas, 8);
  EXPECT_LT(coarse.payload.size(), fine.payload.size());
  EXPECT_GT(codec::quantization_bound(0, 1, 2), codec::quantization_bound(0, 1, 8));
  const auto max_err = [&](const EncodedAtlas& e) {
    const RadianceAtlas back = codec::decode(e);
    double m = 0;
    for (std::size_t k = 0; k < atlas.header().value_count(); ++k) {
      m = std::max(m, static_cast<double>(std::abs(back.value(k) - atlas.value(k))));
    }
    return m;
  };
  EXPECT_GT(max_err(coarse), max_err(fine));
}

TEST(Quantized, RejectsBadInput) {
  const RadianceAtlas bytes = random_atlas(header(1, 1, 2, 3, TexelKind::kU8), 37);
  EXPECT_THROW(codec::encode_quantized(bytes, 4), ConfigError);
  const RadianceAtlas f = random_atlas(header(1, 1, 2), 38);
  EXPECT_THROW(codec::encode_quantized(f, 1), ConfigError);
  EXPECT_THROW(codec::encode_quantized(f, 9), ConfigError);
}

TEST(Decode, UnknownCodecAndTruncation) {
  const RadianceAtlas atlas = random_atlas(header(2, 2, 4), 39);
  EncodedAtlas enc = codec::encode_lossless(atlas);
  enc.codec = static_cast<CodecId>(99);
  try {
    codec::decode(enc);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_EQ(e.kind(), FormatError::Kind::kCodec);
  }
  for (EncodedAtlas e : {codec::encode_lossless(atlas), codec::encode_quantized(atlas, 5)}) {
    e.payload.resize(e.payload.size() / 2);
    try {
      codec::decode(e);
      FAIL();
    } catch (const FormatError& err) {
      EXPECT_EQ(err.kind(), FormatError::Kind::kTruncated);
    }
  }
}

TEST(Container, EncodedSectionDeserializes) {
  const RadianceAtlas atlas = smooth_atlas(header(4, 4, 8));
  const auto lossless = codec::serialize(codec::encode_lossless(atlas));
  EXPECT_LT(lossless.size(), serialize(atlas).size());
  EXPECT_TRUE(bit_equal(deserialize(lossless), atlas));

  const EncodedAtlas q = codec::encode_quantized(atlas, 6);
  EXPECT_TRUE(bit_equal(deserialize(codec::serialize(q)), codec::decode(q)));

  auto truncated = lossless;
  truncated.resize(truncated.size() - 3);
  EXPECT_THROW(deserialize(truncated), FormatError);
}

}  // namespace
}  // namespace radtex
