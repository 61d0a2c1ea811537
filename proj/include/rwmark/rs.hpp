#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rwmark/bits.hpp"

namespace rwmark {

// GF(2^5) under the primitive polynomial x^5 + x^2 + 1, generator alpha = 2.
namespace gf32 {

constexpr int kFieldSize = 32;
constexpr int kGroupOrder = 31;
constexpr uint8_t kPrimitivePoly = 0x25;

uint8_t mul(uint8_t a, uint8_t b);
uint8_t inv(uint8_t a);            // a != 0
uint8_t pow_alpha(int e);          // alpha^e, any integer e
int log_alpha(uint8_t a);          // a != 0, result in [0, 30]

}  // namespace gf32

// Systematic RS(31, k) over GF(2^5): message symbols first, then n-k parity
// symbols from the generator polynomial prod_{i=1..n-k} (x - alpha^i).
// Corrects up to t = (n - k) / 2 symbol errors (k odd).
class RsCode {
 public:
  explicit RsCode(int k = 3);

  int n() const { return 31; }
  int k() const { return k_; }
  int t() const { return (31 - k_) / 2; }

  std::array<uint8_t, 31> encode(const std::vector<uint8_t>& msg) const;

  struct DecodeResult {
    std::vector<uint8_t> msg;
    int corrected = 0;
    bool ok = false;  // false: uncorrectable, msg holds the raw systematic symbols
  };
  DecodeResult decode(const std::array<uint8_t, 31>& received) const;

 private:
  int k_;
  std::vector<uint8_t> generator_;  // generator poly, generator_[0] = leading 1
};

// Payload <-> codeword packing. Symbols are 5 bits, MSB-first; the payload is
// zero-padded to a whole number of k-symbol messages. Payload length is
// carried out-of-band (the LEN header), never inside codewords.
std::vector<std::array<uint8_t, 31>> payload_pack(const BitVec& payload, const RsCode& code);
BitVec payload_unpack(const std::vector<std::vector<uint8_t>>& msgs, size_t payload_bits,
                      const RsCode& code);

BitVec codeword_to_bits(const std::array<uint8_t, 31>& cw);
std::array<uint8_t, 31> bits_to_codeword(const BitVec& bits, size_t offset);

}  // namespace rwmark
