#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rwmark/bits.hpp"

namespace rwmark {

// 8-bit grayscale image, row-major.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> data;

  uint8_t at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
  uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
  size_t pixel_count() const { return static_cast<size_t>(height) * width; }

  bool operator==(const GrayImage&) const = default;
};

GrayImage make_image(int height, int width, uint8_t fill = 0);

// Binary PGM (P5), maxval <= 255. Canonical output: "P5\n<w> <h>\n255\n" + raw bytes.
// Comments in input headers are accepted and skipped, never emitted.
GrayImage pgm_load(const std::vector<uint8_t>& bytes);
std::vector<uint8_t> pgm_save(const GrayImage& img);
GrayImage pgm_load_file(const std::string& path);
void pgm_save_file(const GrayImage& img, const std::string& path);

// Plane k in [1,8], 1 = least significant. bits are raster order.
struct BitPlane {
  int index = 0;
  int height = 0;
  int width = 0;
  BitVec bits;
};

std::array<BitPlane, 8> bitplane_split(const GrayImage& img);
GrayImage bitplane_merge(const std::array<BitPlane, 8>& planes);

// Single-bit access into a pixel's plane k, linear (raster) pixel index.
inline int plane_bit(const GrayImage& img, int k, size_t pixel) {
  return (img.data[pixel] >> (k - 1)) & 1;
}
inline void set_plane_bit(GrayImage& img, int k, size_t pixel, int bit) {
  uint8_t mask = static_cast<uint8_t>(1u << (k - 1));
  if (bit)
    img.data[pixel] |= mask;
  else
    img.data[pixel] &= static_cast<uint8_t>(~mask);
}

}  // namespace rwmark
