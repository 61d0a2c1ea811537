#include "rwmark/spiral.hpp"

#include "rwmark/errors.hpp"

namespace rwmark {

SpiralOrder spiral_order(int height, int width) {
  SpiralOrder s;
  s.height = height;
  s.width = width;
  s.order.reserve(static_cast<size_t>(height) * width);
  int top = 0, bottom = height - 1, left = 0, right = width - 1;
  while (top <= bottom && left <= right) {
    for (int c = left; c <= right; ++c) s.order.push_back(static_cast<uint32_t>(top * width + c));
    for (int r = top + 1; r <= bottom; ++r) s.order.push_back(static_cast<uint32_t>(r * width + right));
    if (top < bottom && left < right) {
      for (int c = right - 1; c >= left; --c) s.order.push_back(static_cast<uint32_t>(bottom * width + c));
      for (int r = bottom - 1; r > top; --r) s.order.push_back(static_cast<uint32_t>(r * width + left));
    }
    ++top;
    --bottom;
    ++left;
    --right;
  }
  return s;
}

namespace {

constexpr uint32_t kLenBits = 32;
constexpr uint32_t kFlagBits = 31;
constexpr uint32_t kRlenHalf = 16;

// Per-segment fixed cost before the copy span: LEN + FLAG, plus RLEN_hi in the
// outer segment. The center segment additionally loses RLEN_lo from the tail
// of the transition segment.
bool layout_fits(uint64_t n, const std::array<uint32_t, 4>& b, uint32_t copy_len, uint64_t r) {
  uint64_t seg0 = b[1] - b[0];
  uint64_t seg1 = b[2] - b[1];
  uint64_t seg2 = b[3] - b[2];
  if (seg0 < kLenBits + kFlagBits + kRlenHalf + static_cast<uint64_t>(copy_len)) return false;
  if (seg1 < kLenBits + kFlagBits + static_cast<uint64_t>(copy_len) + kRlenHalf) return false;
  if (seg2 < kLenBits + kFlagBits + static_cast<uint64_t>(copy_len)) return false;
  uint64_t reserved = 2 * (3 * static_cast<uint64_t>(kLenBits) + 3 * static_cast<uint64_t>(copy_len)) +
                      (3 * static_cast<uint64_t>(kFlagBits) + 2 * kRlenHalf);
  if (reserved > 2 * n) return false;
  return r <= 2 * n - reserved;
}

std::array<uint32_t, 4> segment_bounds_for(uint64_t n) {
  return {0u, static_cast<uint32_t>(n / 3), static_cast<uint32_t>(2 * n / 3), static_cast<uint32_t>(n)};
}

}  // namespace

PlaneLayout build_layout_coded(int height, int width, uint32_t payload_bits, uint32_t copy_len,
                               uint64_t displaced_bits) {
  uint64_t n = static_cast<uint64_t>(height) * width;
  auto bounds = segment_bounds_for(n);
  if (!layout_fits(n, bounds, copy_len, displaced_bits)) {
    uint64_t feasible = max_feasible_payload(height, width, displaced_bits);
    throw CapacityError("layout does not fit: payload " + std::to_string(payload_bits) + " bits, " +
                            std::to_string(displaced_bits) + " displaced bits in " +
                            std::to_string(2 * n) + " plane bits (max feasible payload " +
                            std::to_string(feasible) + ")",
                        feasible);
  }

  PlaneLayout lay;
  lay.height = height;
  lay.width = width;
  lay.payload_bits = payload_bits;
  lay.copy_len = copy_len;
  lay.displaced_bits = displaced_bits;
  lay.segment_bounds = bounds;

  for (int seg = 0; seg < 3; ++seg) {
    uint32_t pos = bounds[seg];
    lay.len_spans[seg] = {pos, pos + kLenBits};
    pos += kLenBits;
    lay.flag_spans[seg] = {pos, pos + kFlagBits};
    pos += kFlagBits;
    if (seg == 0) {
      lay.rlen_hi = {pos, pos + kRlenHalf};
      pos += kRlenHalf;
    }
    lay.copy_spans[seg] = {pos, pos + copy_len};
  }
  lay.rlen_lo = {bounds[2] - kRlenHalf, bounds[2]};

  // Plane 7 mirrors LEN and copy spans; FLAG/RLEN positions are gaps there.
  for (int seg = 0; seg < 3; ++seg) {
    Span after_len = {lay.len_spans[seg].end, lay.copy_spans[seg].begin};
    if (after_len.size() > 0) lay.gaps7.push_back(after_len);
    Span tail = {lay.copy_spans[seg].end, bounds[seg + 1]};
    if (tail.size() > 0) lay.gaps7.push_back(tail);
  }
  for (int seg = 0; seg < 3; ++seg) {
    uint32_t gap_begin = lay.copy_spans[seg].end;
    uint32_t gap_end = (seg == 1) ? lay.rlen_lo.begin : bounds[seg + 1];
    if (gap_end > gap_begin) lay.gaps8.push_back({gap_begin, gap_end});
  }

  uint64_t cap = 0;
  for (const Span& s : lay.gaps7) cap += s.size();
  for (const Span& s : lay.gaps8) cap += s.size();
  lay.gap_capacity = cap;
  return lay;
}

PlaneLayout build_layout(int height, int width, uint32_t payload_bits, uint64_t displaced_bits) {
  return build_layout_coded(height, width, payload_bits, coded_copy_len(payload_bits),
                            displaced_bits);
}

uint64_t max_feasible_payload(int height, int width, uint64_t displaced_bits,
                              uint32_t bits_per_codeword) {
  uint64_t n = static_cast<uint64_t>(height) * width;
  auto bounds = segment_bounds_for(n);
  if (!layout_fits(n, bounds, 0, displaced_bits)) return 0;
  // Codeword counts are small (copy span <= N/3); scan for the largest fit.
  uint64_t m = 0;
  while (layout_fits(n, bounds, static_cast<uint32_t>((m + 1) * kCodewordBits), displaced_bits)) {
    ++m;
  }
  return m * bits_per_codeword;
}

namespace {

template <typename Fn>
void for_each_gap_position(const PlaneLayout& layout, uint64_t count, Fn&& fn) {
  uint64_t idx = 0;
  for (int plane = 7; plane <= 8; ++plane) {
    const auto& gaps = (plane == 7) ? layout.gaps7 : layout.gaps8;
    for (const Span& s : gaps) {
      for (uint32_t p = s.begin; p < s.end; ++p) {
        if (idx >= count) return;
        fn(plane, p, idx);
        ++idx;
      }
    }
  }
}

}  // namespace

void displace_bits(GrayImage& img, const PlaneLayout& layout, const SpiralOrder& spiral,
                   const BitVec& stream) {
  if (stream.size() > layout.gap_capacity) {
    throw CapacityError("displaced stream of " + std::to_string(stream.size()) +
                            " bits exceeds gap capacity " + std::to_string(layout.gap_capacity),
                        layout.gap_capacity);
  }
  for_each_gap_position(layout, stream.size(), [&](int plane, uint32_t pos, uint64_t idx) {
    set_plane_bit(img, plane, spiral.order[pos], stream[idx]);
  });
}

BitVec restore_bits(const GrayImage& img, const PlaneLayout& layout, const SpiralOrder& spiral,
                    uint64_t count) {
  if (count > layout.gap_capacity) {
    throw CapacityError("requested " + std::to_string(count) + " bits from gaps of capacity " +
                            std::to_string(layout.gap_capacity),
                        layout.gap_capacity);
  }
  BitVec out(count);
  for_each_gap_position(layout, count, [&](int plane, uint32_t pos, uint64_t idx) {
    out[idx] = static_cast<uint8_t>(plane_bit(img, plane, spiral.order[pos]));
  });
  return out;
}

}  // namespace rwmark
