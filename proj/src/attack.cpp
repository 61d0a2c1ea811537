#include "rwmark/attack.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rwmark/cipher.hpp"
#include "rwmark/errors.hpp"

namespace rwmark {

GrayImage gaussian_noise(const GrayImage& img, double variance, uint64_t seed) {
  if (variance < 0.0) throw Error("gaussian_noise: negative variance");
  if (variance == 0.0) return img;
  double sigma = 255.0 * std::sqrt(variance);
  KeyedPrng prng(seed);
  GrayImage out = img;
  for (auto& px : out.data) {
    double noisy = px + prng.normal() * sigma;
    long v = std::lround(noisy);
    px = static_cast<uint8_t>(std::clamp<long>(v, 0, 255));
  }
  return out;
}

namespace {

// Annex K luminance table, row-major.
constexpr int kBaseQuant[64] = {
    16, 11, 10, 16, 24,  40,  51,  61,   //
    12, 12, 14, 19, 26,  58,  60,  55,   //
    14, 13, 16, 24, 40,  57,  69,  56,   //
    14, 17, 22, 29, 51,  87,  80,  62,   //
    18, 22, 37, 56, 68,  109, 103, 77,   //
    24, 35, 55, 64, 81,  104, 113, 92,   //
    49, 64, 78, 87, 103, 121, 120, 101,  //
    72, 92, 95, 98, 112, 100, 103, 99};

// Orthonormal 8x8 DCT basis: basis[u][x] = c(u)/2 * cos((2x+1) u pi / 16).
struct DctBasis {
  double m[8][8];
  DctBasis() {
    const double pi = 3.14159265358979323846;
    for (int u = 0; u < 8; ++u) {
      double cu = (u == 0) ? 1.0 / std::sqrt(2.0) : 1.0;
      for (int x = 0; x < 8; ++x) {
        m[u][x] = 0.5 * cu * std::cos((2 * x + 1) * u * pi / 16.0);
      }
    }
  }
};

const DctBasis& dct_basis() {
  static const DctBasis b;
  return b;
}

void forward_dct(const double in[8][8], double out[8][8]) {
  const auto& basis = dct_basis();
  double tmp[8][8];
  for (int u = 0; u < 8; ++u) {
    for (int y = 0; y < 8; ++y) {
      double acc = 0;
      for (int x = 0; x < 8; ++x) acc += basis.m[u][x] * in[x][y];
      tmp[u][y] = acc;
    }
  }
  for (int u = 0; u < 8; ++u) {
    for (int v = 0; v < 8; ++v) {
      double acc = 0;
      for (int y = 0; y < 8; ++y) acc += basis.m[v][y] * tmp[u][y];
      out[u][v] = acc;
    }
  }
}

void inverse_dct(const double in[8][8], double out[8][8]) {
  const auto& basis = dct_basis();
  double tmp[8][8];
  for (int x = 0; x < 8; ++x) {
    for (int v = 0; v < 8; ++v) {
      double acc = 0;
      for (int u = 0; u < 8; ++u) acc += basis.m[u][x] * in[u][v];
      tmp[x][v] = acc;
    }
  }
  for (int x = 0; x < 8; ++x) {
    for (int y = 0; y < 8; ++y) {
      double acc = 0;
      for (int v = 0; v < 8; ++v) acc += basis.m[v][y] * tmp[x][v];
      out[x][y] = acc;
    }
  }
}

}  // namespace

std::array<int, 64> jpeg_quant_table(int quality) {
  if (quality < 1 || quality > 100) throw Error("jpeg: quality must be in [1, 100]");
  int scale = quality < 50 ? 5000 / quality : 200 - 2 * quality;
  std::array<int, 64> q;
  for (int i = 0; i < 64; ++i) {
    q[i] = std::clamp((kBaseQuant[i] * scale + 50) / 100, 1, 255);
  }
  return q;
}

GrayImage jpeg_attack(const GrayImage& img, int quality) {
  std::array<int, 64> quant = jpeg_quant_table(quality);

  int ph = (img.height + 7) / 8 * 8;
  int pw = (img.width + 7) / 8 * 8;
  GrayImage padded = make_image(ph, pw);
  for (int r = 0; r < ph; ++r) {
    for (int c = 0; c < pw; ++c) {
      padded.at(r, c) = img.at(std::min(r, img.height - 1), std::min(c, img.width - 1));
    }
  }

  GrayImage out = make_image(img.height, img.width);
  double block[8][8], coef[8][8], rec[8][8];
  for (int br = 0; br < ph; br += 8) {
    for (int bc = 0; bc < pw; bc += 8) {
      for (int x = 0; x < 8; ++x) {
        for (int y = 0; y < 8; ++y) {
          block[x][y] = static_cast<double>(padded.at(br + x, bc + y)) - 128.0;
        }
      }
      forward_dct(block, coef);
      for (int u = 0; u < 8; ++u) {
        for (int v = 0; v < 8; ++v) {
          int q = quant[u * 8 + v];
          long level = std::lround(coef[u][v] / q);
          coef[u][v] = static_cast<double>(level) * q;
        }
      }
      inverse_dct(coef, rec);
      for (int x = 0; x < 8; ++x) {
        int r = br + x;
        if (r >= img.height) break;
        for (int y = 0; y < 8; ++y) {
          int c = bc + y;
          if (c >= img.width) break;
          long v = std::lround(rec[x][y] + 128.0);
          out.at(r, c) = static_cast<uint8_t>(std::clamp<long>(v, 0, 255));
        }
      }
    }
  }
  return out;
}

GrayImage crop_fixed(const GrayImage& img, int x, int y, int w, int h) {
  if (x < 0 || y < 0 || w < 0 || h < 0 || x + w > img.width || y + h > img.height) {
    throw Error("crop_fixed: rectangle out of bounds");
  }
  GrayImage out = img;
  for (int r = y; r < y + h; ++r) {
    for (int c = x; c < x + w; ++c) {
      out.at(r, c) = 0;
    }
  }
  return out;
}

CropPosition crop_position_from_name(const std::string& name) {
  if (name == "top_left") return CropPosition::TopLeft;
  if (name == "middle") return CropPosition::Middle;
  if (name == "top_right") return CropPosition::TopRight;
  throw ParseError("unknown crop position: " + name);
}

CropRect crop_preset(int img_width, int img_height, int size, CropPosition pos) {
  CropRect r;
  r.w = size;
  r.h = size;
  switch (pos) {
    case CropPosition::TopLeft:
      r.x = 0;
      r.y = 0;
      break;
    case CropPosition::Middle:
      r.x = (img_width - size) / 2;
      r.y = (img_height - size) / 2;
      break;
    case CropPosition::TopRight:
      r.x = img_width - size;
      r.y = 0;
      break;
  }
  return r;
}

std::pair<GrayImage, CropRect> crop_random(const GrayImage& img, double ratio, uint64_t seed) {
  if (ratio <= 0.0 || ratio >= 1.0) throw Error("crop_random: ratio must be in (0, 1)");
  KeyedPrng prng(seed);
  double area = ratio * static_cast<double>(img.pixel_count());
  // Log-uniform aspect ratio w/h in [1/4, 4].
  double aspect = std::pow(4.0, 2.0 * prng.unit_double() - 1.0);
  long h = std::lround(std::sqrt(area / aspect));
  h = std::clamp<long>(h, 1, img.height);
  long w = std::lround(area / static_cast<double>(h));
  if (w > img.width) {
    w = img.width;
    h = std::clamp<long>(std::lround(area / static_cast<double>(w)), 1, img.height);
  }
  w = std::clamp<long>(w, 1, img.width);
  int x = static_cast<int>(prng.uniform_below(img.width - w + 1));
  int y = static_cast<int>(prng.uniform_below(img.height - h + 1));
  CropRect rect{x, y, static_cast<int>(w), static_cast<int>(h)};
  return {crop_fixed(img, rect.x, rect.y, rect.w, rect.h), rect};
}

GrayImage apply_attack(const GrayImage& img, const AttackSpec& spec) {
  switch (spec.kind) {
    case AttackSpec::Kind::Gaussian:
      return gaussian_noise(img, spec.variance, spec.seed);
    case AttackSpec::Kind::Jpeg:
      return jpeg_attack(img, spec.qf);
    case AttackSpec::Kind::CropFixed:
      return crop_fixed(img, spec.rect.x, spec.rect.y, spec.rect.w, spec.rect.h);
    case AttackSpec::Kind::CropRandom:
      return crop_random(img, spec.ratio, spec.seed).first;
  }
  throw Error("apply_attack: unknown kind");
}

}  // namespace rwmark
