#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>

#include "rwmark/image.hpp"

namespace rwmark {

struct CropRect {
  int x = 0;  // column of the left edge
  int y = 0;  // row of the top edge
  int w = 0;
  int h = 0;
};

// Additive Gaussian noise with variance on the normalized [0,1] scale
// (pixel-domain sigma = 255 * sqrt(variance)); rounded to nearest (ties away
// from zero) and clipped to [0,255]. Deterministic given the seed.
GrayImage gaussian_noise(const GrayImage& img, double variance, uint64_t seed);

// Baseline JPEG round trip: level shift, 8x8 DCT, quantization with the
// standard luminance table under the conventional QF scaling, dequantize,
// inverse DCT, clamp. Entropy coding is lossless and skipped. Dimensions not
// divisible by 8 are edge-replicated and cropped back.
GrayImage jpeg_attack(const GrayImage& img, int quality);

// Quantization table for a quality factor, zig-zag-free (row-major 8x8).
std::array<int, 64> jpeg_quant_table(int quality);

// Zeroes the rectangle; everything else unchanged.
GrayImage crop_fixed(const GrayImage& img, int x, int y, int w, int h);

enum class CropPosition { TopLeft, Middle, TopRight };
CropPosition crop_position_from_name(const std::string& name);
CropRect crop_preset(int img_width, int img_height, int size, CropPosition pos);

// Random rectangle of area ~ ratio * N with aspect ratio in [1/4, 4], clamped
// to the image. Returns the ground-truth rectangle for harness bookkeeping.
std::pair<GrayImage, CropRect> crop_random(const GrayImage& img, double ratio, uint64_t seed);

struct AttackSpec {
  enum class Kind { Gaussian, Jpeg, CropFixed, CropRandom };
  Kind kind = Kind::Gaussian;
  double variance = 0.0;  // gaussian
  int qf = 100;           // jpeg
  CropRect rect;          // crop_fixed
  double ratio = 0.0;     // crop_random
  uint64_t seed = 0;
};

GrayImage apply_attack(const GrayImage& img, const AttackSpec& spec);

}  // namespace rwmark
