#include "rwmark/cipher.hpp"

#include <cmath>
#include <cstring>

#include "rwmark/errors.hpp"

namespace rwmark {

namespace {

inline uint32_t rotl32(uint32_t x, int n) { return (x << n) | (x >> (32 - n)); }

inline void quarter_round(uint32_t& a, uint32_t& b, uint32_t& c, uint32_t& d) {
  a += b; d ^= a; d = rotl32(d, 16);
  c += d; b ^= c; b = rotl32(b, 12);
  a += b; d ^= a; d = rotl32(d, 8);
  c += d; b ^= c; b = rotl32(b, 7);
}

inline uint32_t load_le32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

inline void store_le32(uint8_t* p, uint32_t v) {
  p[0] = static_cast<uint8_t>(v);
  p[1] = static_cast<uint8_t>(v >> 8);
  p[2] = static_cast<uint8_t>(v >> 16);
  p[3] = static_cast<uint8_t>(v >> 24);
}

// One ChaCha20 block (20 rounds). Key = seed repeated twice.
void chacha20_block(const Seed128& seed, uint64_t counter, uint64_t nonce,
                    std::array<uint8_t, 64>& out) {
  static const uint32_t kSigma[4] = {0x61707865u, 0x3320646eu, 0x79622d32u, 0x6b206574u};
  uint32_t state[16];
  state[0] = kSigma[0];
  state[1] = kSigma[1];
  state[2] = kSigma[2];
  state[3] = kSigma[3];
  for (int i = 0; i < 4; ++i) {
    uint32_t w = load_le32(seed.data() + 4 * i);
    state[4 + i] = w;
    state[8 + i] = w;
  }
  state[12] = static_cast<uint32_t>(counter);
  state[13] = static_cast<uint32_t>(counter >> 32);
  state[14] = static_cast<uint32_t>(nonce);
  state[15] = static_cast<uint32_t>(nonce >> 32);

  uint32_t x[16];
  std::memcpy(x, state, sizeof(x));
  for (int round = 0; round < 10; ++round) {
    quarter_round(x[0], x[4], x[8], x[12]);
    quarter_round(x[1], x[5], x[9], x[13]);
    quarter_round(x[2], x[6], x[10], x[14]);
    quarter_round(x[3], x[7], x[11], x[15]);
    quarter_round(x[0], x[5], x[10], x[15]);
    quarter_round(x[1], x[6], x[11], x[12]);
    quarter_round(x[2], x[7], x[8], x[13]);
    quarter_round(x[3], x[4], x[9], x[14]);
  }
  for (int i = 0; i < 16; ++i) {
    store_le32(out.data() + 4 * i, x[i] + state[i]);
  }
}

uint64_t splitmix64(uint64_t& x) {
  x += 0x9e3779b97f4a7c15ull;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Seed128 seed_from_hex(const std::string& hex32) {
  if (hex32.size() != 32) throw ParseError("key must be exactly 32 hex characters");
  Seed128 seed{};
  for (size_t i = 0; i < 16; ++i) {
    int hi = hex_nibble(hex32[2 * i]);
    int lo = hex_nibble(hex32[2 * i + 1]);
    if (hi < 0 || lo < 0) throw ParseError("key contains a non-hex character");
    seed[i] = static_cast<uint8_t>((hi << 4) | lo);
  }
  return seed;
}

std::string seed_to_hex(const Seed128& seed) {
  static const char* digits = "0123456789abcdef";
  std::string s(32, '0');
  for (size_t i = 0; i < 16; ++i) {
    s[2 * i] = digits[seed[i] >> 4];
    s[2 * i + 1] = digits[seed[i] & 0xf];
  }
  return s;
}

std::vector<uint8_t> keystream_bytes(const Seed128& seed, size_t nbytes, uint64_t domain) {
  std::vector<uint8_t> out(nbytes);
  std::array<uint8_t, 64> block;
  uint64_t counter = 0;
  size_t done = 0;
  while (done < nbytes) {
    chacha20_block(seed, counter++, domain, block);
    size_t take = std::min<size_t>(64, nbytes - done);
    std::memcpy(out.data() + done, block.data(), take);
    done += take;
  }
  return out;
}

BitVec keystream(const Seed128& seed, size_t nbits, uint64_t domain) {
  auto bytes = keystream_bytes(seed, (nbits + 7) / 8, domain);
  BitVec bits = bytes_to_bits(bytes.data(), bytes.size());
  bits.resize(nbits);
  return bits;
}

void xor_bits_inplace(BitVec& bits, const Seed128& seed, uint64_t domain) {
  BitVec ks = keystream(seed, bits.size(), domain);
  for (size_t i = 0; i < bits.size(); ++i) bits[i] ^= ks[i];
}

BitVec xor_bits(BitVec bits, const Seed128& seed) {
  xor_bits_inplace(bits, seed, domain::kEncrypt);
  return bits;
}

BitVec block_permute(const BitVec& bits, const Seed128& seed, size_t block_len, Direction dir) {
  size_t nblocks = block_len == 0 ? 0 : bits.size() / block_len;
  if (nblocks < 2) return bits;

  // Fisher-Yates from the back; perm[i] = source block of output slot i.
  std::vector<uint32_t> perm(nblocks);
  for (size_t i = 0; i < nblocks; ++i) perm[i] = static_cast<uint32_t>(i);
  KeyedPrng prng(seed, domain::kShuffle);
  for (size_t i = nblocks - 1; i > 0; --i) {
    size_t j = prng.uniform_below(i + 1);
    std::swap(perm[i], perm[j]);
  }

  BitVec out = bits;  // tail beyond the last full block is copied unchanged
  for (size_t i = 0; i < nblocks; ++i) {
    size_t src = (dir == Direction::Forward) ? perm[i] : i;
    size_t dst = (dir == Direction::Forward) ? i : perm[i];
    std::memcpy(out.data() + dst * block_len, bits.data() + src * block_len, block_len);
  }
  return out;
}

KeyedPrng::KeyedPrng(const Seed128& seed, uint64_t domain) : seed_(seed), domain_(domain) {}

KeyedPrng::KeyedPrng(uint64_t seed64) {
  uint64_t x = seed64;
  for (int i = 0; i < 2; ++i) {
    uint64_t w = splitmix64(x);
    for (int b = 0; b < 8; ++b) seed_[8 * i + b] = static_cast<uint8_t>(w >> (8 * b));
  }
  domain_ = 0;
}

void KeyedPrng::refill() {
  chacha20_block(seed_, counter_++, domain_, block_);
  offset_ = 0;
}

uint64_t KeyedPrng::next_u64() {
  if (offset_ + 8 > 64) refill();
  uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | block_[offset_ + i];
  offset_ += 8;
  return v;
}

uint64_t KeyedPrng::uniform_below(uint64_t n) {
  if (n == 0) throw Error("uniform_below(0)");
  if (n == 1) return 0;
  uint64_t limit = ~0ull - (~0ull % n);
  uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double KeyedPrng::unit_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double KeyedPrng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  double u2 = unit_double();
  double mag = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * 3.14159265358979323846 * u2;
  spare_ = mag * std::sin(ang);
  have_spare_ = true;
  return mag * std::cos(ang);
}

}  // namespace rwmark
