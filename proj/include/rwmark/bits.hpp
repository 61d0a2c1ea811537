#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rwmark {

// One bit per element, each 0 or 1. All multi-bit fields are packed MSB-first.
using BitVec = std::vector<uint8_t>;

void append_uint(BitVec& bits, uint64_t value, int width);
uint64_t read_uint(const BitVec& bits, size_t pos, int width);

// MSB-first within each byte.
BitVec bytes_to_bits(const uint8_t* data, size_t nbytes);
std::vector<uint8_t> bits_to_bytes(const BitVec& bits);

// Sequential bounds-checked reader; overruns throw CorruptStream.
class BitReader {
 public:
  explicit BitReader(const BitVec& bits) : bits_(&bits) {}
  int bit();
  uint64_t take(int width);
  void skip(uint64_t count);
  size_t consumed() const { return pos_; }
  size_t remaining() const { return bits_->size() - pos_; }

 private:
  const BitVec* bits_;
  size_t pos_ = 0;
};

}  // namespace rwmark
