#pragma once

#include <array>
#include <cstdint>

#include "rwmark/image.hpp"

namespace rwmark {

// Deterministic natural-looking test image: multi-octave value noise plus a
// few soft blobs. grain adds per-pixel Gaussian texture (intensity units) to
// steer compressibility; 0 keeps the image smooth.
GrayImage synth_natural(int height, int width, uint64_t seed, double grain = 0.0);

// Remaps src through a monotone value mapping so its histogram matches
// target_hist exactly (counts must sum to the pixel count). Spatial structure
// is preserved; ties broken by raster index.
GrayImage histogram_specify(const GrayImage& src, const std::array<uint64_t, 256>& target_hist);

// Bimodal target histogram tuned by bisection until its entropy lands within
// tol of target_entropy.
std::array<uint64_t, 256> entropy_tuned_histogram(size_t pixel_count, double target_entropy,
                                                  double tol);

// 512x512 textured stand-in for the classic mandrill test image: natural
// structure with histogram entropy 7.3583 +/- 0.0005.
GrayImage synth_baboon_like(uint64_t seed);

}  // namespace rwmark
