#include <doctest.h>

#include "rwmark/cipher.hpp"
#include "rwmark/errors.hpp"
#include "rwmark/image.hpp"

using namespace rwmark;

namespace {

GrayImage random_image(KeyedPrng& prng, int maxdim = 64) {
  int h = 1 + static_cast<int>(prng.uniform_below(maxdim));
  int w = 1 + static_cast<int>(prng.uniform_below(maxdim));
  GrayImage img = make_image(h, w);
  for (auto& px : img.data) px = static_cast<uint8_t>(prng.uniform_below(256));
  return img;
}

}  // namespace

TEST_CASE("pgm_load parses a minimal 1x1 image") {
  std::vector<uint8_t> bytes = {'P', '5', '\n', '1', ' ', '1', '\n', '2', '5', '5', '\n', 0x00};
  GrayImage img = pgm_load(bytes);
  CHECK(img.height == 1);
  CHECK(img.width == 1);
  CHECK(img.data[0] == 0);
}

TEST_CASE("pgm_load maps 2x2 payload bytes row-major") {
  std::vector<uint8_t> bytes = {'P', '5', '\n', '2', ' ', '2', '\n', '2', '5', '5', '\n',
                                0, 255, 128, 64};
  GrayImage img = pgm_load(bytes);
  CHECK(img.at(0, 0) == 0);
  CHECK(img.at(0, 1) == 255);
  CHECK(img.at(1, 0) == 128);
  CHECK(img.at(1, 1) == 64);
}

TEST_CASE("pgm_save emits the canonical header") {
  GrayImage img = make_image(1, 1, 7);
  auto bytes = pgm_save(img);
  std::string header(bytes.begin(), bytes.end() - 1);
  CHECK(header == "P5\n1 1\n255\n");
  CHECK(bytes.back() == 7);
}

TEST_CASE("pgm_save of a 512x512 image has header plus 262144 payload bytes") {
  GrayImage img = make_image(512, 512, 9);
  auto bytes = pgm_save(img);
  CHECK(bytes.size() == std::string("P5\n512 512\n255\n").size() + 262144);
}

TEST_CASE("pgm header comments are accepted and never re-emitted") {
  std::vector<uint8_t> bytes;
  std::string header = "P5\n# a comment\n 2 # another\n1\n255\n";
  bytes.insert(bytes.end(), header.begin(), header.end());
  bytes.push_back(10);
  bytes.push_back(20);
  GrayImage img = pgm_load(bytes);
  CHECK(img.width == 2);
  CHECK(img.height == 1);
  auto out = pgm_save(img);
  std::string saved(out.begin(), out.end());
  CHECK(saved.find('#') == std::string::npos);
}

TEST_CASE("pgm_load rejects malformed input") {
  CHECK_THROWS_AS(pgm_load({'P', '6', '\n'}), ParseError);
  CHECK_THROWS_AS(pgm_load({'P', '5', '\n', 'x'}), ParseError);
  // maxval > 255
  std::string s = "P5\n1 1\n65535\n";
  std::vector<uint8_t> bytes(s.begin(), s.end());
  bytes.push_back(0);
  bytes.push_back(0);
  CHECK_THROWS_AS(pgm_load(bytes), UnsupportedError);
  // truncated payload
  std::string t = "P5\n4 4\n255\n";
  std::vector<uint8_t> tb(t.begin(), t.end());
  tb.push_back(1);
  CHECK_THROWS_AS(pgm_load(tb), ParseError);
}

TEST_CASE("pgm roundtrip is bit-exact for 100 random images") {
  KeyedPrng prng(101);
  for (int i = 0; i < 100; ++i) {
    GrayImage img = random_image(prng);
    GrayImage back = pgm_load(pgm_save(img));
    CHECK(back == img);
  }
}

TEST_CASE("bitplane_split puts single powers of two in single planes") {
  GrayImage img = make_image(2, 2, 255);
  auto planes = bitplane_split(img);
  for (int k = 1; k <= 8; ++k) {
    CHECK(planes[k - 1].index == k);
    CHECK(planes[k - 1].bits[0] == 1);
  }
  img = make_image(1, 1, 128);
  planes = bitplane_split(img);
  for (int k = 1; k <= 8; ++k) CHECK(planes[k - 1].bits[0] == (k == 8 ? 1 : 0));
  img = make_image(1, 1, 64);
  planes = bitplane_split(img);
  for (int k = 1; k <= 8; ++k) CHECK(planes[k - 1].bits[0] == (k == 7 ? 1 : 0));
}

TEST_CASE("bitplane_merge of planes 7 and 8 yields constant 192") {
  GrayImage zero = make_image(3, 5, 0);
  auto planes = bitplane_split(zero);
  CHECK(bitplane_merge(planes) == zero);  // all-zero planes -> all-zero image
  for (size_t i = 0; i < zero.pixel_count(); ++i) {
    planes[6].bits[i] = 1;
    planes[7].bits[i] = 1;
  }
  GrayImage merged = bitplane_merge(planes);
  for (uint8_t px : merged.data) CHECK(px == 192);
}

TEST_CASE("bitplane merge-split roundtrip on 100 random images") {
  KeyedPrng prng(202);
  for (int i = 0; i < 100; ++i) {
    GrayImage img = random_image(prng);
    CHECK(bitplane_merge(bitplane_split(img)) == img);
  }
}

TEST_CASE("bitplane_merge rejects mismatched dimensions") {
  auto planes = bitplane_split(make_image(2, 2, 0));
  planes[3] = bitplane_split(make_image(2, 3, 0))[3];
  CHECK_THROWS_AS(bitplane_merge(planes), Error);
}

TEST_CASE("split bit matches the k-th binary digit at every pixel") {
  KeyedPrng prng(303);
  GrayImage img = random_image(prng, 32);
  auto planes = bitplane_split(img);
  for (int k = 1; k <= 8; ++k) {
    for (size_t i = 0; i < img.pixel_count(); ++i) {
      CHECK(planes[k - 1].bits[i] == ((img.data[i] >> (k - 1)) & 1));
    }
  }
}
