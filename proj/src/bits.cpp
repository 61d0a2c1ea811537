#include "rwmark/bits.hpp"

#include "rwmark/errors.hpp"

namespace rwmark {

void append_uint(BitVec& bits, uint64_t value, int width) {
  for (int i = width - 1; i >= 0; --i) {
    bits.push_back(static_cast<uint8_t>((value >> i) & 1u));
  }
}

uint64_t read_uint(const BitVec& bits, size_t pos, int width) {
  if (pos + static_cast<size_t>(width) > bits.size()) {
    throw CorruptStream("read_uint: past end of bit vector");
  }
  uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v = (v << 1) | bits[pos + i];
  }
  return v;
}

BitVec bytes_to_bits(const uint8_t* data, size_t nbytes) {
  BitVec bits;
  bits.reserve(nbytes * 8);
  for (size_t i = 0; i < nbytes; ++i) {
    for (int b = 7; b >= 0; --b) {
      bits.push_back(static_cast<uint8_t>((data[i] >> b) & 1u));
    }
  }
  return bits;
}

std::vector<uint8_t> bits_to_bytes(const BitVec& bits) {
  std::vector<uint8_t> bytes((bits.size() + 7) / 8, 0);
  for (size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) bytes[i / 8] |= static_cast<uint8_t>(0x80u >> (i % 8));
  }
  return bytes;
}

int BitReader::bit() {
  if (pos_ >= bits_->size()) {
    throw CorruptStream("bit stream ended early");
  }
  return (*bits_)[pos_++];
}

uint64_t BitReader::take(int width) {
  uint64_t v = 0;
  for (int i = 0; i < width; ++i) {
    v = (v << 1) | static_cast<uint64_t>(bit());
  }
  return v;
}

void BitReader::skip(uint64_t count) {
  if (count > remaining()) {
    throw CorruptStream("bit stream ended early");
  }
  pos_ += count;
}

}  // namespace rwmark
