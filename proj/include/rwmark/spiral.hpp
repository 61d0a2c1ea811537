#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rwmark/bits.hpp"
#include "rwmark/image.hpp"

namespace rwmark {

// Clockwise outside-in traversal starting at (0,0), moving right first.
// order[spiral_index] = linear (raster) pixel index.
struct SpiralOrder {
  int height = 0;
  int width = 0;
  std::vector<uint32_t> order;
};

SpiralOrder spiral_order(int height, int width);

// Half-open range of spiral indices.
struct Span {
  uint32_t begin = 0;
  uint32_t end = 0;
  uint32_t size() const { return end - begin; }
};

// Partition of bit-planes 7/8 along the spiral. The spiral splits into three
// segments (outer / transition / center thirds, remainder to center). Each
// segment opens with a 32-bit LEN field (plane 8, mirrored into plane 7)
// followed by a 31-bit FLAG replica block (plane 8 only); the outer segment
// then carries the high 16 bits of RLEN, and the low 16 bits sit immediately
// before the center segment's LEN field. One watermark copy of copy_len bits
// follows each segment's fixed fields, mirrored across both planes. Every
// remaining position is gap space for the displaced bitstream.
struct PlaneLayout {
  int height = 0;
  int width = 0;
  uint32_t payload_bits = 0;
  uint32_t copy_len = 0;       // coded bits per copy (L_c)
  uint64_t displaced_bits = 0; // R

  std::array<uint32_t, 4> segment_bounds{};  // 0, N/3, 2N/3, N
  std::array<Span, 3> len_spans{};
  std::array<Span, 3> flag_spans{};
  Span rlen_hi{};
  Span rlen_lo{};
  std::array<Span, 3> copy_spans{};
  std::vector<Span> gaps7;  // plane-7 gap spans, spiral order
  std::vector<Span> gaps8;  // plane-8 gap spans, spiral order
  uint64_t gap_capacity = 0;
};

// Fixed per-carrier header cost: 2 planes x 3 LEN fields + 3 FLAG blocks + RLEN.
constexpr uint64_t kLayoutHeaderBits = 2 * 3 * 32 + 3 * 31 + 32;  // 317

constexpr uint32_t kCodewordBits = 155;  // 31 symbols x 5 bits
constexpr uint32_t kPayloadBitsPerCodeword = 15;  // k = 3 symbols x 5 bits

inline uint32_t coded_copy_len(uint32_t payload_bits, uint32_t bits_per_codeword = kPayloadBitsPerCodeword) {
  if (payload_bits == 0) return 0;
  return (payload_bits + bits_per_codeword - 1) / bits_per_codeword * kCodewordBits;
}

// Layout is a pure function of (H, W, payload_bits, R); both ends recompute
// it, nothing is serialized. Throws CapacityError with the largest feasible
// payload when the request does not fit.
PlaneLayout build_layout(int height, int width, uint32_t payload_bits, uint64_t displaced_bits);

// Same, with the coded copy length given explicitly (RS(31,k) experiments).
PlaneLayout build_layout_coded(int height, int width, uint32_t payload_bits, uint32_t copy_len,
                               uint64_t displaced_bits);

// Largest payload (in bits) for which build_layout succeeds, k = 3.
uint64_t max_feasible_payload(int height, int width, uint64_t displaced_bits,
                              uint32_t bits_per_codeword = kPayloadBitsPerCodeword);

// Writes stream into gap positions: plane-7 gaps first, then plane-8 gaps,
// each in spiral order. Unused gap positions are left untouched.
void displace_bits(GrayImage& img, const PlaneLayout& layout, const SpiralOrder& spiral,
                   const BitVec& stream);

// Exact inverse read of displace_bits.
BitVec restore_bits(const GrayImage& img, const PlaneLayout& layout, const SpiralOrder& spiral,
                    uint64_t count);

}  // namespace rwmark
