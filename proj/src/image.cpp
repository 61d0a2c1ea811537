#include "rwmark/image.hpp"

#include <cstdio>
#include <fstream>

#include "rwmark/errors.hpp"

namespace rwmark {

GrayImage make_image(int height, int width, uint8_t fill) {
  GrayImage img;
  img.height = height;
  img.width = width;
  img.data.assign(static_cast<size_t>(height) * width, fill);
  return img;
}

namespace {

// Skips PGM whitespace and '#' comments, then parses a decimal token.
int parse_pgm_int(const std::vector<uint8_t>& b, size_t& pos) {
  while (pos < b.size()) {
    uint8_t c = b[pos];
    if (c == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size() || b[pos] < '0' || b[pos] > '9') {
    throw ParseError("PGM: expected integer in header");
  }
  long v = 0;
  while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
    v = v * 10 + (b[pos] - '0');
    if (v > 1 << 24) throw ParseError("PGM: header value out of range");
    ++pos;
  }
  return static_cast<int>(v);
}

}  // namespace

GrayImage pgm_load(const std::vector<uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    throw ParseError("PGM: missing P5 magic");
  }
  size_t pos = 2;
  int w = parse_pgm_int(bytes, pos);
  int h = parse_pgm_int(bytes, pos);
  int maxval = parse_pgm_int(bytes, pos);
  if (w <= 0 || h <= 0) throw ParseError("PGM: nonpositive dimensions");
  if (maxval > 255) throw UnsupportedError("PGM: maxval > 255 not supported");
  if (maxval <= 0) throw ParseError("PGM: bad maxval");
  // Exactly one whitespace byte separates the header from the payload.
  if (pos >= bytes.size()) throw ParseError("PGM: truncated header");
  uint8_t sep = bytes[pos];
  if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n') {
    throw ParseError("PGM: missing whitespace before payload");
  }
  ++pos;
  size_t n = static_cast<size_t>(w) * h;
  if (bytes.size() - pos < n) throw ParseError("PGM: truncated pixel data");
  GrayImage img;
  img.height = h;
  img.width = w;
  img.data.assign(bytes.begin() + pos, bytes.begin() + pos + n);
  return img;
}

std::vector<uint8_t> pgm_save(const GrayImage& img) {
  char header[64];
  int len = std::snprintf(header, sizeof(header), "P5\n%d %d\n255\n", img.width, img.height);
  std::vector<uint8_t> out(header, header + len);
  out.insert(out.end(), img.data.begin(), img.data.end());
  return out;
}

GrayImage pgm_load_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open " + path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return pgm_load(bytes);
}

void pgm_save_file(const GrayImage& img, const std::string& path) {
  auto bytes = pgm_save(img);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ParseError("cannot write " + path);
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ParseError("short write to " + path);
}

std::array<BitPlane, 8> bitplane_split(const GrayImage& img) {
  std::array<BitPlane, 8> planes;
  size_t n = img.pixel_count();
  for (int k = 1; k <= 8; ++k) {
    BitPlane& p = planes[k - 1];
    p.index = k;
    p.height = img.height;
    p.width = img.width;
    p.bits.resize(n);
    for (size_t i = 0; i < n; ++i) {
      p.bits[i] = static_cast<uint8_t>((img.data[i] >> (k - 1)) & 1u);
    }
  }
  return planes;
}

GrayImage bitplane_merge(const std::array<BitPlane, 8>& planes) {
  int h = planes[0].height, w = planes[0].width;
  for (const auto& p : planes) {
    if (p.height != h || p.width != w) throw Error("bitplane_merge: dimension mismatch");
  }
  GrayImage img = make_image(h, w);
  size_t n = img.pixel_count();
  for (int k = 1; k <= 8; ++k) {
    const BitVec& bits = planes[k - 1].bits;
    for (size_t i = 0; i < n; ++i) {
      if (bits[i]) img.data[i] |= static_cast<uint8_t>(1u << (k - 1));
    }
  }
  return img;
}

}  // namespace rwmark
