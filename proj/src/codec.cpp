#include "rwmark/codec.hpp"

#include <algorithm>
#include <vector>

#include "rwmark/compress.hpp"
#include "rwmark/errors.hpp"
#include "rwmark/rs.hpp"

namespace rwmark {

namespace {

constexpr size_t kShuffleBlockBits = 512;
constexpr int kCarrierPlanes = 6;  // planes 1-6 hold the packed stream

PlaneLayout header_layout(int h, int w) { return build_layout_coded(h, w, 0, 0, 0); }

uint32_t read_field(const GrayImage& img, const SpiralOrder& sp, const Span& span, int plane) {
  uint32_t v = 0;
  for (uint32_t p = span.begin; p < span.end; ++p) {
    v = (v << 1) | static_cast<uint32_t>(plane_bit(img, plane, sp.order[p]));
  }
  return v;
}

void write_field(GrayImage& img, const SpiralOrder& sp, const Span& span, int plane, uint64_t value) {
  int width = static_cast<int>(span.size());
  for (int i = 0; i < width; ++i) {
    int bit = static_cast<int>((value >> (width - 1 - i)) & 1u);
    set_plane_bit(img, plane, sp.order[span.begin + i], bit);
  }
}

// LEN is written to plane 8 and mirrored into plane 7 (dual pairing).
void write_len_headers(GrayImage& img, const PlaneLayout& lay, const SpiralOrder& sp,
                       uint32_t len) {
  for (int seg = 0; seg < 3; ++seg) {
    write_field(img, sp, lay.len_spans[seg], 8, len);
    write_field(img, sp, lay.len_spans[seg], 7, len);
  }
}

void write_flag_rlen(GrayImage& img, const PlaneLayout& lay, const SpiralOrder& sp, int flag,
                     uint32_t rlen) {
  for (int seg = 0; seg < 3; ++seg) {
    for (uint32_t p = lay.flag_spans[seg].begin; p < lay.flag_spans[seg].end; ++p) {
      set_plane_bit(img, 8, sp.order[p], flag);
    }
  }
  write_field(img, sp, lay.rlen_hi, 8, (rlen >> 16) & 0xffffu);
  write_field(img, sp, lay.rlen_lo, 8, rlen & 0xffffu);
}

int flag_majority(const GrayImage& img, const PlaneLayout& lay, const SpiralOrder& sp,
                  const CropMap* map) {
  int ones = 0, total = 0;
  for (int seg = 0; seg < 3; ++seg) {
    for (uint32_t p = lay.flag_spans[seg].begin; p < lay.flag_spans[seg].end; ++p) {
      uint32_t px = sp.order[p];
      if (map && !map->trusted[px]) continue;
      ones += plane_bit(img, 8, px);
      ++total;
    }
  }
  if (total == 0) return 0;
  return ones * 2 > total ? 1 : 0;
}

void write_copies(GrayImage& img, const PlaneLayout& lay, const SpiralOrder& sp,
                  const BitVec& coded) {
  for (int seg = 0; seg < 3; ++seg) {
    const Span& span = lay.copy_spans[seg];
    for (size_t j = 0; j < coded.size(); ++j) {
      uint32_t px = sp.order[span.begin + j];
      set_plane_bit(img, 8, px, coded[j]);
      set_plane_bit(img, 7, px, coded[j]);
    }
  }
}

}  // namespace

GrayImage owner_prepare(const GrayImage& img, const KeyBundle& keys,
                        uint32_t requested_max_payload, PrepareInfo* info) {
  const int h = img.height, w = img.width;
  const uint64_t n = img.pixel_count();
  const uint64_t carrier_bits = kCarrierPlanes * n;

  CompressedPackage pkg = compress_image(img);
  const uint64_t stream_bits = pkg.total_bits;

  int flag;
  uint64_t displaced;
  BitVec plain;
  if (stream_bits <= carrier_bits) {
    flag = 0;
    displaced = 0;
    plain = pkg.stream;
    plain.resize(carrier_bits, 0);  // encrypted zero padding keeps planes flat
  } else {
    flag = 1;
    displaced = stream_bits - carrier_bits;
    plain = pkg.stream;
  }

  uint64_t feasible = max_feasible_payload(h, w, displaced);
  if (flag == 1) {
    PlaneLayout probe = build_layout(h, w, 0, 0);
    if (displaced > probe.gap_capacity) {
      throw CapacityError("image is incompressible: " + std::to_string(displaced) +
                              " displaced bits exceed gap capacity " +
                              std::to_string(probe.gap_capacity),
                          0);
    }
  }
  uint32_t reserved = static_cast<uint32_t>(
      std::min<uint64_t>(requested_max_payload, feasible));
  PlaneLayout lay = build_layout(h, w, reserved, displaced);
  SpiralOrder sp = spiral_order(h, w);

  xor_bits_inplace(plain, keys.image_key, domain::kEncrypt);
  BitVec enc = block_permute(plain, keys.shuffle_key, kShuffleBlockBits, Direction::Forward);

  GrayImage carrier = make_image(h, w);
  for (int k = 1; k <= kCarrierPlanes; ++k) {
    const size_t base = static_cast<size_t>(k - 1) * n;
    for (size_t p = 0; p < n; ++p) {
      set_plane_bit(carrier, k, p, enc[base + p]);
    }
  }

  // Copy regions get paired fill (both MSBs equal, like an embedded bit);
  // gap positions beyond the displaced stream get independent fill.
  uint64_t fill_needed = 3ull * lay.copy_len + (lay.gap_capacity - displaced);
  BitVec fill = keystream(keys.image_key, fill_needed, domain::kPlaneFill);
  size_t fidx = 0;
  for (int seg = 0; seg < 3; ++seg) {
    for (uint32_t p = lay.copy_spans[seg].begin; p < lay.copy_spans[seg].end; ++p) {
      int bit = fill[fidx++];
      set_plane_bit(carrier, 8, sp.order[p], bit);
      set_plane_bit(carrier, 7, sp.order[p], bit);
    }
  }
  {
    uint64_t gidx = 0;
    for (int plane = 7; plane <= 8; ++plane) {
      const auto& gaps = (plane == 7) ? lay.gaps7 : lay.gaps8;
      for (const Span& s : gaps) {
        for (uint32_t p = s.begin; p < s.end; ++p) {
          int bit = (gidx < displaced) ? enc[carrier_bits + gidx] : fill[fidx++];
          set_plane_bit(carrier, plane, sp.order[p], bit);
          ++gidx;
        }
      }
    }
  }

  write_len_headers(carrier, lay, sp, reserved);
  write_flag_rlen(carrier, lay, sp, flag, static_cast<uint32_t>(displaced));

  if (info) {
    info->flag = static_cast<uint8_t>(flag);
    info->displaced_bits = displaced;
    info->stream_bits = stream_bits;
    info->reserved_payload = reserved;
    info->feasible_payload = feasible;
  }
  return carrier;
}

CarrierHeaders read_headers(const GrayImage& carrier) {
  PlaneLayout lay = header_layout(carrier.height, carrier.width);
  SpiralOrder sp = spiral_order(carrier.height, carrier.width);
  CarrierHeaders hdr;
  for (int seg = 0; seg < 3; ++seg) {
    hdr.len[seg] = read_field(carrier, sp, lay.len_spans[seg], 8);
  }
  hdr.flag = static_cast<uint8_t>(flag_majority(carrier, lay, sp, nullptr));
  hdr.rlen = static_cast<uint32_t>((read_field(carrier, sp, lay.rlen_hi, 8) << 16) |
                                   read_field(carrier, sp, lay.rlen_lo, 8));
  return hdr;
}

namespace {

uint32_t len_majority_value(const CarrierHeaders& hdr) {
  if (hdr.len[0] == hdr.len[1] || hdr.len[0] == hdr.len[2]) return hdr.len[0];
  if (hdr.len[1] == hdr.len[2]) return hdr.len[1];
  return hdr.len[0];
}

}  // namespace

uint64_t max_capacity(const GrayImage& carrier) {
  CarrierHeaders hdr = read_headers(carrier);
  if (hdr.len[0] != hdr.len[1] || hdr.len[1] != hdr.len[2]) {
    throw IntegrityError("length header copies disagree");
  }
  uint64_t displaced = hdr.flag ? hdr.rlen : 0;
  return max_feasible_payload(carrier.height, carrier.width, displaced);
}

GrayImage embed_watermark(const GrayImage& carrier, const BitVec& payload,
                          const Seed128& watermark_key, int rs_k) {
  const int h = carrier.height, w = carrier.width;
  if (payload.empty()) throw Error("embed: payload must be nonempty");
  RsCode code(rs_k);
  const uint32_t bits_per_cw = static_cast<uint32_t>(5 * rs_k);

  CarrierHeaders hdr = read_headers(carrier);
  const uint64_t displaced = hdr.flag ? hdr.rlen : 0;
  const uint64_t cap = max_feasible_payload(h, w, displaced, bits_per_cw);
  if (payload.size() > cap) {
    throw CapacityError("payload of " + std::to_string(payload.size()) +
                            " bits exceeds capacity " + std::to_string(cap),
                        cap);
  }

  const uint32_t len = static_cast<uint32_t>(payload.size());
  const uint32_t old_copy_len = coded_copy_len(len_majority_value(hdr));
  const uint32_t new_copy_len = coded_copy_len(len, bits_per_cw);
  SpiralOrder sp = spiral_order(h, w);

  // If the copy span size changes, the displaced stream moves with the gaps.
  BitVec relocated;
  bool relocate = (new_copy_len != old_copy_len) && displaced > 0;
  if (relocate) {
    PlaneLayout old_lay =
        build_layout_coded(h, w, len_majority_value(hdr), old_copy_len, displaced);
    relocated = restore_bits(carrier, old_lay, sp, displaced);
  }
  PlaneLayout lay = build_layout_coded(h, w, len, new_copy_len, displaced);

  BitVec enc_payload = payload;
  xor_bits_inplace(enc_payload, watermark_key, domain::kEncrypt);
  BitVec coded;
  coded.reserve(new_copy_len);
  for (const auto& cw : payload_pack(enc_payload, code)) {
    BitVec bits = codeword_to_bits(cw);
    coded.insert(coded.end(), bits.begin(), bits.end());
  }

  GrayImage out = carrier;
  write_copies(out, lay, sp, coded);
  if (relocate) displace_bits(out, lay, sp, relocated);
  write_len_headers(out, lay, sp, len);
  return out;
}

CropMap detect_crop_map(const GrayImage& img) {
  const int h = img.height, w = img.width;
  const size_t n = img.pixel_count();

  // Zero-pixel mask -> 5x5 opening. Erosion via a clipped window sum that
  // only reaches 25 when the full window is inside and all zero.
  std::vector<uint32_t> integral(static_cast<size_t>(h + 1) * (w + 1), 0);
  for (int r = 0; r < h; ++r) {
    uint32_t row = 0;
    for (int c = 0; c < w; ++c) {
      row += img.at(r, c) == 0;
      integral[static_cast<size_t>(r + 1) * (w + 1) + c + 1] =
          integral[static_cast<size_t>(r) * (w + 1) + c + 1] + row;
    }
  }
  auto zero_count = [&](int r0, int c0, int r1, int c1) {  // half-open
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, h);
    c1 = std::min(c1, w);
    if (r0 >= r1 || c0 >= c1) return 0u;
    return integral[static_cast<size_t>(r1) * (w + 1) + c1] -
           integral[static_cast<size_t>(r0) * (w + 1) + c1] -
           integral[static_cast<size_t>(r1) * (w + 1) + c0] +
           integral[static_cast<size_t>(r0) * (w + 1) + c0];
  };

  std::vector<uint8_t> eroded(n, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      eroded[static_cast<size_t>(r) * w + c] =
          zero_count(r - 2, c - 2, r + 3, c + 3) == 25 ? 1 : 0;
    }
  }

  // Dilation by the same 5x5 element, via an integral over the eroded mask.
  std::vector<uint32_t> eint(static_cast<size_t>(h + 1) * (w + 1), 0);
  for (int r = 0; r < h; ++r) {
    uint32_t row = 0;
    for (int c = 0; c < w; ++c) {
      row += eroded[static_cast<size_t>(r) * w + c];
      eint[static_cast<size_t>(r + 1) * (w + 1) + c + 1] =
          eint[static_cast<size_t>(r) * (w + 1) + c + 1] + row;
    }
  }
  auto eroded_any = [&](int r0, int c0, int r1, int c1) {
    r0 = std::max(r0, 0);
    c0 = std::max(c0, 0);
    r1 = std::min(r1, h);
    c1 = std::min(c1, w);
    if (r0 >= r1 || c0 >= c1) return false;
    return (eint[static_cast<size_t>(r1) * (w + 1) + c1] -
            eint[static_cast<size_t>(r0) * (w + 1) + c1] -
            eint[static_cast<size_t>(r1) * (w + 1) + c0] +
            eint[static_cast<size_t>(r0) * (w + 1) + c0]) > 0;
  };

  std::vector<uint8_t> opened(n, 0);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      opened[static_cast<size_t>(r) * w + c] = eroded_any(r - 2, c - 2, r + 3, c + 3) ? 1 : 0;
    }
  }

  // Connected components (8-connectivity); area >= 64 -> untrusted.
  CropMap map;
  map.height = h;
  map.width = w;
  map.trusted.assign(n, 1);
  std::vector<int32_t> label(n, -1);
  std::vector<uint32_t> stack;
  int32_t next_label = 0;
  for (size_t start = 0; start < n; ++start) {
    if (!opened[start] || label[start] >= 0) continue;
    stack.clear();
    stack.push_back(static_cast<uint32_t>(start));
    label[start] = next_label;
    std::vector<uint32_t> members;
    while (!stack.empty()) {
      uint32_t p = stack.back();
      stack.pop_back();
      members.push_back(p);
      int r = static_cast<int>(p) / w, c = static_cast<int>(p) % w;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= h || cc < 0 || cc >= w) continue;
          size_t q = static_cast<size_t>(rr) * w + cc;
          if (opened[q] && label[q] < 0) {
            label[q] = next_label;
            stack.push_back(static_cast<uint32_t>(q));
          }
        }
      }
    }
    if (members.size() >= 64) {
      for (uint32_t p : members) map.trusted[p] = 0;
    }
    ++next_label;
  }
  return map;
}

int fuse_bit(const std::array<int, 3>& bits, const std::array<int, 3>& trusted) {
  int ssum = trusted[0] + trusted[1] + trusted[2];
  if (ssum == 3) {
    return (bits[0] + bits[1] + bits[2] >= 2) ? 1 : 0;
  }
  if (ssum == 0) return 0;
  for (int i = 0; i < 3; ++i) {
    if (trusted[i]) return bits[i];
  }
  return 0;
}

namespace {

struct LenReads {
  std::array<uint32_t, 3> value8{};
  std::array<bool, 3> span_trusted{};
  // Per copy, per bit: plane-7/plane-8 agreement (erasure signal under noise).
  std::array<std::array<uint8_t, 32>, 3> agree{};
  std::array<std::array<uint8_t, 32>, 3> bit8{};
};

LenReads read_len_fields(const GrayImage& img, const PlaneLayout& lay, const SpiralOrder& sp,
                         const CropMap& map) {
  LenReads r;
  for (int seg = 0; seg < 3; ++seg) {
    const Span& span = lay.len_spans[seg];
    bool trusted = true;
    uint32_t v = 0;
    for (uint32_t i = 0; i < 32; ++i) {
      uint32_t px = sp.order[span.begin + i];
      int b8 = plane_bit(img, 8, px);
      int b7 = plane_bit(img, 7, px);
      r.bit8[seg][i] = static_cast<uint8_t>(b8);
      r.agree[seg][i] = static_cast<uint8_t>(b7 == b8);
      if (!map.trusted[px]) trusted = false;
      v = (v << 1) | static_cast<uint32_t>(b8);
    }
    r.value8[seg] = v;
    r.span_trusted[seg] = trusted;
  }
  return r;
}

// Bitwise majority over the trusted copies, optionally erasure-gated by the
// dual-MSBs agreement signal. Ties resolve to the first trusted copy.
uint32_t bitwise_majority(const LenReads& r, bool erasure_gated) {
  uint32_t out = 0;
  for (int i = 0; i < 32; ++i) {
    int ones = 0, total = 0;
    if (erasure_gated) {
      for (int seg = 0; seg < 3; ++seg) {
        if (!r.span_trusted[seg] || !r.agree[seg][i]) continue;
        ones += r.bit8[seg][i];
        ++total;
      }
    }
    if (total == 0) {
      for (int seg = 0; seg < 3; ++seg) {
        if (!r.span_trusted[seg]) continue;
        ones += r.bit8[seg][i];
        ++total;
      }
    }
    int bit;
    if (2 * ones > total) {
      bit = 1;
    } else if (2 * ones < total) {
      bit = 0;
    } else {
      bit = -1;  // tie
      for (int seg = 0; seg < 3 && bit < 0; ++seg) {
        if (!r.span_trusted[seg]) continue;
        if (erasure_gated && !r.agree[seg][i]) continue;
        bit = r.bit8[seg][i];
      }
      if (bit < 0) bit = 0;
    }
    out = (out << 1) | static_cast<uint32_t>(bit);
  }
  return out;
}

struct CopyRead {
  std::vector<std::vector<uint8_t>> msgs;
  int failed = 0;
  int corrected = 0;
};

CopyRead read_and_decode(const GrayImage& img, const SpiralOrder& sp, const CropMap& map,
                         uint32_t payload_bits, const RsCode& code) {
  const uint32_t bits_per_cw = static_cast<uint32_t>(5 * code.k());
  const uint32_t ncw = (payload_bits + bits_per_cw - 1) / bits_per_cw;
  const uint32_t coded_len = ncw * kCodewordBits;
  PlaneLayout lay = build_layout_coded(img.height, img.width, payload_bits, coded_len, 0);

  BitVec fused(coded_len);
  for (uint32_t j = 0; j < coded_len; ++j) {
    std::array<int, 3> b{}, s{};
    for (int seg = 0; seg < 3; ++seg) {
      uint32_t px = sp.order[lay.copy_spans[seg].begin + j];
      b[seg] = plane_bit(img, 8, px);
      s[seg] = map.trusted[px];
    }
    fused[j] = static_cast<uint8_t>(fuse_bit(b, s));
  }

  CopyRead out;
  out.msgs.reserve(ncw);
  for (uint32_t c = 0; c < ncw; ++c) {
    auto cw = bits_to_codeword(fused, static_cast<size_t>(c) * kCodewordBits);
    auto dec = code.decode(cw);
    if (dec.ok) {
      out.corrected += dec.corrected;
    } else {
      ++out.failed;  // fall back to the raw systematic symbols
    }
    out.msgs.push_back(std::move(dec.msg));
  }
  return out;
}

}  // namespace

ExtractResult extract_watermark(const GrayImage& attacked, const Seed128& watermark_key,
                                int rs_k, int64_t known_length) {
  const int h = attacked.height, w = attacked.width;
  RsCode code(rs_k);
  const uint32_t bits_per_cw = static_cast<uint32_t>(5 * rs_k);

  CropMap map = detect_crop_map(attacked);
  PlaneLayout hdr_lay;
  try {
    hdr_lay = header_layout(h, w);
  } catch (const CapacityError&) {
    throw ExtractFailure("image too small to carry headers");
  }
  SpiralOrder sp = spiral_order(h, w);

  ExtractResult res;
  res.flag = static_cast<uint8_t>(flag_majority(attacked, hdr_lay, sp, &map));

  uint32_t length = 0;
  CopyRead chosen;
  if (known_length >= 0) {
    length = static_cast<uint32_t>(known_length);
    if (length == 0) throw ExtractFailure("known length is zero");
    chosen = read_and_decode(attacked, sp, map, length, code);
  } else {
    LenReads reads = read_len_fields(attacked, hdr_lay, sp, map);
    if (!reads.span_trusted[0] && !reads.span_trusted[1] && !reads.span_trusted[2]) {
      throw ExtractFailure("all three length fields are inside cropped regions");
    }

    const uint64_t struct_max = max_feasible_payload(h, w, 0, bits_per_cw);
    std::vector<uint32_t> candidates;
    auto add = [&](uint32_t v) {
      if (v == 0 || v > struct_max) return;
      for (uint32_t c : candidates) {
        if (c == v) return;
      }
      candidates.push_back(v);
    };
    add(bitwise_majority(reads, true));
    add(bitwise_majority(reads, false));
    for (int seg = 0; seg < 3; ++seg) {
      if (reads.span_trusted[seg]) add(reads.value8[seg]);
    }
    if (candidates.empty()) {
      throw ExtractFailure("no plausible length header survived the attack");
    }

    // The true length decodes with the fewest codeword failures.
    int best = -1;
    for (size_t i = 0; i < candidates.size(); ++i) {
      CopyRead r = read_and_decode(attacked, sp, map, candidates[i], code);
      if (best < 0 || r.failed < chosen.failed) {
        best = static_cast<int>(i);
        chosen = std::move(r);
        length = candidates[best];
        if (chosen.failed == 0) break;
      }
    }
  }

  res.length = length;
  res.failed_codewords = chosen.failed;
  res.corrected_symbols = chosen.corrected;
  res.payload = payload_unpack(chosen.msgs, length, code);
  xor_bits_inplace(res.payload, watermark_key, domain::kEncrypt);
  return res;
}

GrayImage restore_image(const GrayImage& marked, const Seed128& image_key,
                        const Seed128& shuffle_key) {
  const int h = marked.height, w = marked.width;
  const uint64_t n = marked.pixel_count();
  const uint64_t carrier_bits = kCarrierPlanes * n;

  CarrierHeaders hdr = read_headers(marked);
  const uint32_t len = len_majority_value(hdr);
  const uint64_t displaced = hdr.flag ? hdr.rlen : 0;

  BitVec bits(carrier_bits + displaced);
  for (int k = 1; k <= kCarrierPlanes; ++k) {
    const size_t base = static_cast<size_t>(k - 1) * n;
    for (size_t p = 0; p < n; ++p) {
      bits[base + p] = static_cast<uint8_t>(plane_bit(marked, k, p));
    }
  }
  if (displaced > 0) {
    try {
      PlaneLayout lay = build_layout(h, w, len, displaced);
      SpiralOrder sp = spiral_order(h, w);
      BitVec tail = restore_bits(marked, lay, sp, displaced);
      std::copy(tail.begin(), tail.end(), bits.begin() + carrier_bits);
    } catch (const CapacityError& e) {
      throw RestoreFailure(std::string("headers are inconsistent: ") + e.what());
    }
  }

  BitVec plain = block_permute(bits, shuffle_key, kShuffleBlockBits, Direction::Inverse);
  xor_bits_inplace(plain, image_key, domain::kEncrypt);

  try {
    CompressedPackage pkg = parse_package(plain, h, w);
    return decompress_image(pkg);
  } catch (const CorruptStream& e) {
    throw RestoreFailure(std::string("stream does not decode, image was attacked: ") + e.what());
  }
}

}  // namespace rwmark
