#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rwmark/bits.hpp"

namespace rwmark {

// Opaque 128-bit key material, supplied as 32 hex characters.
using Seed128 = std::array<uint8_t, 16>;

Seed128 seed_from_hex(const std::string& hex32);
std::string seed_to_hex(const Seed128& seed);

// Keystream domains (ChaCha20 nonce values). One seed never reuses a
// (domain, counter) pair across purposes.
namespace domain {
constexpr uint64_t kEncrypt = 0;    // buffer encryption / default keystream
constexpr uint64_t kPlaneFill = 1;  // statistical fill of planes 7/8
constexpr uint64_t kShuffle = 2;    // Fisher-Yates driving words
constexpr uint64_t kPayload = 3;    // harness payload derivation (+image index)
}  // namespace domain

// ChaCha20 keystream in counter mode: seed doubled to the 256-bit key,
// 64-bit block counter, 64-bit nonce = domain tag. Deterministic and seekable.
std::vector<uint8_t> keystream_bytes(const Seed128& seed, size_t nbytes,
                                     uint64_t domain = domain::kEncrypt);
BitVec keystream(const Seed128& seed, size_t nbits, uint64_t domain = domain::kEncrypt);

// XOR with the keystream; applying twice restores the input.
void xor_bits_inplace(BitVec& bits, const Seed128& seed, uint64_t domain = domain::kEncrypt);
BitVec xor_bits(BitVec bits, const Seed128& seed);

enum class Direction { Forward, Inverse };

// Keyed Fisher-Yates permutation of full block_len-bit blocks; a tail shorter
// than block_len stays in place.
BitVec block_permute(const BitVec& bits, const Seed128& seed, size_t block_len, Direction dir);

// Deterministic PRNG over the ChaCha20 stream; used wherever the toolkit
// needs keyed or seeded randomness (shuffle, attacks, Monte Carlo).
class KeyedPrng {
 public:
  KeyedPrng(const Seed128& seed, uint64_t domain);
  explicit KeyedPrng(uint64_t seed64);  // seed expanded via splitmix64

  uint64_t next_u64();
  uint64_t uniform_below(uint64_t n);  // unbiased, rejection sampled
  double unit_double();                // [0, 1)
  double normal();                     // standard normal, Box-Muller

 private:
  void refill();
  Seed128 seed_{};
  uint64_t domain_ = 0;
  uint64_t counter_ = 0;
  std::array<uint8_t, 64> block_{};
  size_t offset_ = 64;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace rwmark
