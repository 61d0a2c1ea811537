#include "rwmark/compress.hpp"

#include <algorithm>
#include <unordered_set>

#include "rwmark/errors.hpp"

namespace rwmark {

namespace {

constexpr int kBlockSizes[4] = {2, 4, 8, 16};
constexpr int kMaxOverflowDim = 512;  // 9-bit coordinates

uint8_t med_at(const GrayImage& img, int r, int c) {
  if (r == 0 && c == 0) return 0;
  if (r == 0) return img.at(r, c - 1);
  if (c == 0) return img.at(r - 1, c);
  int a = img.at(r, c - 1);      // left
  int b = img.at(r - 1, c);      // above
  int d = img.at(r - 1, c - 1);  // above-left
  int mx = std::max(a, b), mn = std::min(a, b);
  if (d >= mx) return static_cast<uint8_t>(mn);
  if (d <= mn) return static_cast<uint8_t>(mx);
  return static_cast<uint8_t>(a + b - d);
}

// Error image: folded codes, with overflow pixels holding their raw value.
struct ErrorImage {
  std::vector<uint8_t> values;
  std::vector<std::pair<uint16_t, uint16_t>> overflow;
};

ErrorImage build_error_image(const GrayImage& img) {
  ErrorImage e;
  e.values.resize(img.pixel_count());
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      uint8_t pred = med_at(img, r, c);
      uint16_t code = fold_error(img.at(r, c), pred);
      size_t i = static_cast<size_t>(r) * img.width + c;
      if (code <= 255) {
        e.values[i] = static_cast<uint8_t>(code);
      } else {
        e.values[i] = img.at(r, c);
        e.overflow.emplace_back(static_cast<uint16_t>(r), static_cast<uint16_t>(c));
      }
    }
  }
  return e;
}

// Block-coded size of one plane: per full block a flag bit plus s^2 raw bits
// when the block is nonzero; edge pixels raw.
uint64_t block_coded_size(const std::vector<uint8_t>& values, int h, int w, int bit, int s) {
  uint8_t mask = static_cast<uint8_t>(1u << bit);
  int nbr = h / s, nbc = w / s;
  uint64_t size = static_cast<uint64_t>(nbr) * nbc;  // flag bits
  for (int br = 0; br < nbr; ++br) {
    for (int bc = 0; bc < nbc; ++bc) {
      bool nonzero = false;
      for (int r = br * s; r < (br + 1) * s && !nonzero; ++r) {
        const uint8_t* row = values.data() + static_cast<size_t>(r) * w + bc * s;
        for (int c = 0; c < s; ++c) {
          if (row[c] & mask) {
            nonzero = true;
            break;
          }
        }
      }
      if (nonzero) size += static_cast<uint64_t>(s) * s;
    }
  }
  uint64_t edge = static_cast<uint64_t>(h) * w - static_cast<uint64_t>(nbr * s) * (nbc * s);
  return size + edge;
}

void emit_plane_raw(BitVec& out, const std::vector<uint8_t>& values, int bit) {
  uint8_t mask = static_cast<uint8_t>(1u << bit);
  for (uint8_t v : values) out.push_back((v & mask) ? 1 : 0);
}

void emit_plane_blocks(BitVec& out, const std::vector<uint8_t>& values, int h, int w, int bit,
                       int s) {
  uint8_t mask = static_cast<uint8_t>(1u << bit);
  int nbr = h / s, nbc = w / s;
  for (int br = 0; br < nbr; ++br) {
    for (int bc = 0; bc < nbc; ++bc) {
      bool nonzero = false;
      for (int r = br * s; r < (br + 1) * s && !nonzero; ++r) {
        for (int c = bc * s; c < (bc + 1) * s; ++c) {
          if (values[static_cast<size_t>(r) * w + c] & mask) {
            nonzero = true;
            break;
          }
        }
      }
      out.push_back(nonzero ? 1 : 0);
      if (nonzero) {
        for (int r = br * s; r < (br + 1) * s; ++r) {
          for (int c = bc * s; c < (bc + 1) * s; ++c) {
            out.push_back((values[static_cast<size_t>(r) * w + c] & mask) ? 1 : 0);
          }
        }
      }
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (r >= nbr * s || c >= nbc * s) {
        out.push_back((values[static_cast<size_t>(r) * w + c] & mask) ? 1 : 0);
      }
    }
  }
}

void read_plane_raw(BitReader& in, std::vector<uint8_t>& values, int bit) {
  uint8_t mask = static_cast<uint8_t>(1u << bit);
  for (auto& v : values) {
    if (in.bit()) v |= mask;
  }
}

void read_plane_blocks(BitReader& in, std::vector<uint8_t>& values, int h, int w, int bit, int s) {
  uint8_t mask = static_cast<uint8_t>(1u << bit);
  int nbr = h / s, nbc = w / s;
  for (int br = 0; br < nbr; ++br) {
    for (int bc = 0; bc < nbc; ++bc) {
      if (in.bit()) {
        for (int r = br * s; r < (br + 1) * s; ++r) {
          for (int c = bc * s; c < (bc + 1) * s; ++c) {
            if (in.bit()) values[static_cast<size_t>(r) * w + c] |= mask;
          }
        }
      }
    }
  }
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (r >= nbr * s || c >= nbc * s) {
        if (in.bit()) values[static_cast<size_t>(r) * w + c] |= mask;
      }
    }
  }
}

void append_aux(BitVec& out, const AuxInfo& aux) {
  append_uint(out, aux.block_size_code, 4);
  append_uint(out, aux.threshold, 3);
  append_uint(out, aux.overflow_positions.size(), 20);
  for (const auto& [r, c] : aux.overflow_positions) {
    append_uint(out, r, 9);
    append_uint(out, c, 9);
  }
}

AuxInfo read_aux(BitReader& in, int h, int w) {
  AuxInfo aux;
  uint64_t code = in.take(4);
  if (code > 3) throw CorruptStream("aux: block size code out of range");
  aux.block_size_code = static_cast<uint8_t>(code);
  aux.threshold = static_cast<uint8_t>(in.take(3));
  uint64_t count = in.take(20);
  if (count > static_cast<uint64_t>(h) * w) throw CorruptStream("aux: overflow count too large");
  aux.overflow_positions.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    uint16_t r = static_cast<uint16_t>(in.take(9));
    uint16_t c = static_cast<uint16_t>(in.take(9));
    if (r >= h || c >= w) throw CorruptStream("aux: overflow position out of bounds");
    aux.overflow_positions.emplace_back(r, c);
  }
  return aux;
}

}  // namespace

GrayImage med_predict(const GrayImage& img) {
  GrayImage pred = make_image(img.height, img.width);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      pred.at(r, c) = med_at(img, r, c);
    }
  }
  return pred;
}

uint16_t fold_error(uint8_t x, uint8_t pred) {
  int e = static_cast<int>(x) - static_cast<int>(pred);
  return static_cast<uint16_t>(e >= 0 ? 2 * e : -2 * e - 1);
}

uint8_t unfold_error(uint16_t code, uint8_t pred) {
  int e = (code % 2 == 0) ? static_cast<int>(code) / 2 : -(static_cast<int>(code) + 1) / 2;
  int x = static_cast<int>(pred) + e;
  if (x < 0 || x > 255) throw CorruptStream("unfold_error: value out of range");
  return static_cast<uint8_t>(x);
}

CompressedPackage compress_image(const GrayImage& img) {
  const int h = img.height, w = img.width;
  const uint64_t n = img.pixel_count();
  ErrorImage err = build_error_image(img);
  if (!err.overflow.empty() && (h > kMaxOverflowDim || w > kMaxOverflowDim)) {
    throw UnsupportedError("images larger than 512 px with overflow pixels are unsupported");
  }

  const uint64_t aux_bits = 4 + 3 + 20 + 18ull * err.overflow.size();

  // Size of each plane under block coding, per candidate block size.
  uint64_t coded[4][8];
  for (int si = 0; si < 4; ++si) {
    for (int bit = 0; bit < 8; ++bit) {
      coded[si][bit] = block_coded_size(err.values, h, w, bit, kBlockSizes[si]);
    }
  }

  int best_si = 0, best_t = 0;
  uint64_t best_total = UINT64_MAX;
  for (int si = 0; si < 4; ++si) {
    for (int t = 0; t <= 7; ++t) {
      uint64_t total = aux_bits;
      for (int k = 1; k <= 8; ++k) {
        int bit = k - 1;
        uint64_t payload = (k <= t) ? n : std::min(coded[si][bit], n);
        total += 1 + payload;
      }
      if (total < best_total) {
        best_total = total;
        best_si = si;
        best_t = t;
      }
    }
  }

  CompressedPackage pkg;
  pkg.height = h;
  pkg.width = w;
  pkg.aux.block_size_code = static_cast<uint8_t>(best_si);
  pkg.aux.threshold = static_cast<uint8_t>(best_t);
  pkg.aux.overflow_positions = std::move(err.overflow);

  pkg.stream.reserve(best_total);
  append_aux(pkg.stream, pkg.aux);
  const int s = kBlockSizes[best_si];
  for (int k = 1; k <= 8; ++k) {
    int bit = k - 1;
    bool blocks = (k > best_t) && coded[best_si][bit] < n;
    pkg.stream.push_back(blocks ? 1 : 0);
    if (blocks) {
      emit_plane_blocks(pkg.stream, err.values, h, w, bit, s);
    } else {
      emit_plane_raw(pkg.stream, err.values, bit);
    }
  }
  pkg.total_bits = pkg.stream.size();
  return pkg;
}

GrayImage decompress_image(const CompressedPackage& package) {
  CompressedPackage reparsed = parse_package(package.stream, package.height, package.width);
  const int h = package.height, w = package.width;
  const AuxInfo& aux = reparsed.aux;

  // Rebuild the error image from the plane payloads.
  BitReader in(package.stream);
  in.skip(4 + 3 + 20);
  in.skip(18ull * aux.overflow_positions.size());
  std::vector<uint8_t> values(static_cast<size_t>(h) * w, 0);
  for (int k = 1; k <= 8; ++k) {
    int mode = in.bit();
    if (mode) {
      read_plane_blocks(in, values, h, w, k - 1, aux.block_size());
    } else {
      read_plane_raw(in, values, k - 1);
    }
  }

  std::unordered_set<uint32_t> overflow;
  for (const auto& [r, c] : aux.overflow_positions) {
    overflow.insert(static_cast<uint32_t>(r) * w + c);
  }

  GrayImage img = make_image(h, w);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      uint32_t i = static_cast<uint32_t>(r) * w + c;
      if (overflow.count(i)) {
        img.at(r, c) = values[i];
      } else {
        uint8_t pred = med_at(img, r, c);  // earlier pixels already restored
        img.at(r, c) = unfold_error(values[i], pred);
      }
    }
  }
  return img;
}

CompressedPackage parse_package(const BitVec& bits, int height, int width) {
  BitReader in(bits);
  CompressedPackage pkg;
  pkg.height = height;
  pkg.width = width;
  pkg.aux = read_aux(in, height, width);
  const uint64_t n = static_cast<uint64_t>(height) * width;
  const int s = pkg.aux.block_size();
  for (int k = 1; k <= 8; ++k) {
    int mode = in.bit();
    if (!mode) {
      if (in.remaining() < n) throw CorruptStream("raw plane truncated");
      in.skip(n);
    } else {
      int nbr = height / s, nbc = width / s;
      for (int b = 0; b < nbr * nbc; ++b) {
        if (in.bit()) in.skip(static_cast<uint64_t>(s) * s);
      }
      uint64_t edge = n - static_cast<uint64_t>(nbr * s) * (nbc * s);
      in.skip(edge);
    }
  }
  pkg.total_bits = in.consumed();
  pkg.stream.assign(bits.begin(), bits.begin() + pkg.total_bits);
  return pkg;
}

int64_t net_capacity(const CompressedPackage& package, size_t pixel_count) {
  int64_t free_bits = 8 * static_cast<int64_t>(pixel_count) - static_cast<int64_t>(package.total_bits);
  return std::max<int64_t>(free_bits, 0);
}

}  // namespace rwmark
