#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "rwmark/bits.hpp"
#include "rwmark/cipher.hpp"
#include "rwmark/image.hpp"
#include "rwmark/spiral.hpp"

namespace rwmark {

struct KeyBundle {
  Seed128 image_key{};
  Seed128 shuffle_key{};
  Seed128 watermark_key{};
};

struct PrepareInfo {
  uint8_t flag = 0;              // 1 = compressed stream overflows into planes 7/8
  uint64_t displaced_bits = 0;   // R
  uint64_t stream_bits = 0;      // compressed stream length
  uint32_t reserved_payload = 0; // LEN written into the headers
  uint64_t feasible_payload = 0; // largest payload the carrier could take
};

// Compresses, encrypts (keystream XOR + 512-bit block shuffle), packs the
// stream into planes 1-6 (and plane-7/8 gaps when it overflows), writes the
// plaintext LEN/FLAG/RLEN headers, and fills the remaining plane-7/8 bits
// with keystream. Throws CapacityError if the image is incompressible.
GrayImage owner_prepare(const GrayImage& img, const KeyBundle& keys,
                        uint32_t requested_max_payload, PrepareInfo* info = nullptr);

// Largest embeddable payload, derived from the carrier's headers (FLAG/RLEN);
// throws IntegrityError when the three LEN copies disagree.
uint64_t max_capacity(const GrayImage& carrier);

// Encrypts the payload with the watermark keystream, RS(31,k)-codes it, and
// writes the coded bits into all six copy regions (three per plane, plane 7
// mirroring plane 8). Overwrites the LEN headers with the actual length.
GrayImage embed_watermark(const GrayImage& carrier, const BitVec& payload,
                          const Seed128& watermark_key, int rs_k = 3);

// Per-pixel trust mask: 1 = not cropped. Derived blindly from the attacked
// image: zero-pixel mask, 5x5 morphological opening, connected components
// with area >= 64 marked untrusted.
struct CropMap {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> trusted;
};

CropMap detect_crop_map(const GrayImage& img);

// Crop-gated majority vote over the three copy reads (Eq. 2 semantics):
// all trusted -> majority; some trusted -> first trusted; none -> 0.
int fuse_bit(const std::array<int, 3>& bits, const std::array<int, 3>& trusted);

struct ExtractResult {
  BitVec payload;
  uint32_t length = 0;
  uint8_t flag = 0;
  int failed_codewords = 0;
  int corrected_symbols = 0;
};

// Blind extraction from a possibly attacked image. known_length >= 0 skips the
// header vote (controlled experiments with out-of-band parameters).
ExtractResult extract_watermark(const GrayImage& attacked, const Seed128& watermark_key,
                                int rs_k = 3, int64_t known_length = -1);

// Lossless restoration of the original image from an unattacked marked
// carrier. Throws RestoreFailure when the stream does not decode, which
// signals tampering.
GrayImage restore_image(const GrayImage& marked, const Seed128& image_key,
                        const Seed128& shuffle_key);

// Header fields as read back from a carrier (diagnostics and tests).
struct CarrierHeaders {
  std::array<uint32_t, 3> len{};
  uint8_t flag = 0;
  uint32_t rlen = 0;
};

CarrierHeaders read_headers(const GrayImage& carrier);

}  // namespace rwmark
