#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace radtex {

// Row-major float image, row 0 at the top. Values are linear.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 3;
  std::vector<float> data;

  Image() = default;
  Image(int w, int h, int c = 3);

  float& at(int x, int y, int c) { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float at(int x, int y, int c) const { return data[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
};

float srgb_encode(float linear);
float srgb_decode(float encoded);
// Linear value -> 8-bit sRGB code.
unsigned char to_srgb8(float linear);

// P6, maxval 255, sRGB encoded. Single-channel images are written as gray RGB.
void write_ppm(const Image& image, const std::filesystem::path& path);
// "PF" (3 channels) or "Pf" (1 channel), little-endian, scale -1.0. Rows are
// stored bottom-up as the format requires.
void write_pfm(const Image& image, const std::filesystem::path& path);

// Reads P6 (decoded back to linear) or PF/Pf, chosen by magic.
Image read_image(const std::filesystem::path& path);

}  // namespace radtex
