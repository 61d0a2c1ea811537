#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "rwmark/bits.hpp"
#include "rwmark/image.hpp"

namespace rwmark {

// Compression side data needed for lossless restoration. Serialized layout
// (MSB-first per field):
//   [block_size_code:4][threshold_T:3][overflow_count:20][overflow_positions:18 x count]
// with each position a 9-bit row followed by a 9-bit column.
struct AuxInfo {
  uint8_t block_size_code = 0;  // index into {2, 4, 8, 16}
  uint8_t threshold = 0;        // T in [0, 7]; planes k <= T stored raw
  std::vector<std::pair<uint16_t, uint16_t>> overflow_positions;

  int block_size() const { return 2 << block_size_code; }
  uint64_t bit_count() const { return 4 + 3 + 20 + 18ull * overflow_positions.size(); }
};

// Self-delimiting compressed stream: aux serialization followed by the eight
// error bit-planes, each as [mode:1][payload] (mode 0 = raw, 1 = block-coded).
struct CompressedPackage {
  AuxInfo aux;
  BitVec stream;
  int height = 0;
  int width = 0;
  uint64_t total_bits = 0;  // == stream.size()
};

// MED prediction: (0,0) predicts 0, first row from the left neighbor, first
// column from the top neighbor; interior from left (a), above (b),
// above-left (c) per the LOCO-I median edge detector.
GrayImage med_predict(const GrayImage& img);

// Non-negative folding of the prediction error e = x - pred:
// e' = 2e for e >= 0, -2e - 1 otherwise. fold_error/unfold_error are inverses.
uint16_t fold_error(uint8_t x, uint8_t pred);
uint8_t unfold_error(uint16_t code, uint8_t pred);

// Lossless compression with exhaustive (s, T) search over s in {2,4,8,16},
// T in [0,7]; ties broken by smaller s, then smaller T.
CompressedPackage compress_image(const GrayImage& img);
GrayImage decompress_image(const CompressedPackage& package);

// Re-parses a raw bit sequence (dims known out-of-band) into a package,
// consuming exactly the stream's own length; trailing bits are ignored.
CompressedPackage parse_package(const BitVec& bits, int height, int width);

// Free room relative to the 8N carrier bits, clamped at zero.
int64_t net_capacity(const CompressedPackage& package, size_t pixel_count);

}  // namespace rwmark
