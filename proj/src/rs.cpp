#include "rwmark/rs.hpp"

#include "rwmark/errors.hpp"

namespace rwmark {

namespace gf32 {

namespace {

struct Tables {
  uint8_t exp[62];
  int log[32];
  Tables() {
    uint8_t x = 1;
    for (int i = 0; i < 31; ++i) {
      exp[i] = x;
      exp[i + 31] = x;
      log[x] = i;
      x = static_cast<uint8_t>(x << 1);
      if (x & 0x20) x ^= kPrimitivePoly;
    }
    log[0] = -1;
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

uint8_t mul(uint8_t a, uint8_t b) {
  if (a == 0 || b == 0) return 0;
  const Tables& t = tables();
  return t.exp[t.log[a] + t.log[b]];
}

uint8_t inv(uint8_t a) {
  if (a == 0) throw Error("gf32: inverse of zero");
  const Tables& t = tables();
  return t.exp[(31 - t.log[a]) % 31];
}

uint8_t pow_alpha(int e) {
  int m = e % 31;
  if (m < 0) m += 31;
  return tables().exp[m];
}

int log_alpha(uint8_t a) {
  if (a == 0) throw Error("gf32: log of zero");
  return tables().log[a];
}

}  // namespace gf32

namespace {

uint8_t poly_eval(const std::vector<uint8_t>& poly, uint8_t x) {
  // poly[0] is the leading coefficient.
  uint8_t acc = 0;
  for (uint8_t c : poly) acc = static_cast<uint8_t>(gf32::mul(acc, x) ^ c);
  return acc;
}

}  // namespace

RsCode::RsCode(int k) : k_(k) {
  if (k < 1 || k > 29 || (31 - k) % 2 != 0) {
    throw Error("RS(31,k): k must be odd and in [1, 29]");
  }
  // g(x) = prod_{i=1..n-k} (x - alpha^i); generator_[0] = 1 (leading).
  generator_ = {1};
  for (int i = 1; i <= 31 - k_; ++i) {
    uint8_t root = gf32::pow_alpha(i);
    std::vector<uint8_t> next(generator_.size() + 1, 0);
    for (size_t j = 0; j < generator_.size(); ++j) {
      next[j] ^= generator_[j];
      next[j + 1] ^= gf32::mul(generator_[j], root);
    }
    generator_ = std::move(next);
  }
}

std::array<uint8_t, 31> RsCode::encode(const std::vector<uint8_t>& msg) const {
  if (static_cast<int>(msg.size()) != k_) throw Error("RS encode: wrong message size");
  for (uint8_t s : msg) {
    if (s >= 32) throw Error("RS encode: symbol out of range");
  }
  // Long division of msg(x) * x^(n-k) by g(x); remainder becomes the parity.
  std::array<uint8_t, 31> cw{};
  for (int i = 0; i < k_; ++i) cw[i] = msg[i];
  std::vector<uint8_t> work(31, 0);
  for (int i = 0; i < k_; ++i) work[i] = msg[i];
  for (int i = 0; i < k_; ++i) {
    uint8_t coef = work[i];
    if (coef == 0) continue;
    for (size_t j = 1; j < generator_.size(); ++j) {
      work[i + j] ^= gf32::mul(generator_[j], coef);
    }
  }
  for (int i = k_; i < 31; ++i) cw[i] = work[i];
  return cw;
}

RsCode::DecodeResult RsCode::decode(const std::array<uint8_t, 31>& received) const {
  DecodeResult res;
  res.msg.assign(received.begin(), received.begin() + k_);

  const int nk = 31 - k_;
  const int t = nk / 2;

  // Syndromes S_j = r(alpha^j), j = 1..n-k, with r[0] the x^30 coefficient.
  std::vector<uint8_t> rpoly(received.begin(), received.end());
  std::vector<uint8_t> synd(nk + 1, 0);  // 1-based
  bool clean = true;
  for (int j = 1; j <= nk; ++j) {
    synd[j] = poly_eval(rpoly, gf32::pow_alpha(j));
    if (synd[j] != 0) clean = false;
  }
  if (clean) {
    res.ok = true;
    return res;
  }

  // Berlekamp-Massey: error locator lambda(x), lambda[0] = 1.
  std::vector<uint8_t> lambda = {1};
  std::vector<uint8_t> prev = {1};
  int L = 0, m = 1;
  uint8_t b = 1;
  for (int iter = 1; iter <= nk; ++iter) {
    uint8_t delta = synd[iter];
    for (int i = 1; i <= L && i < static_cast<int>(lambda.size()); ++i) {
      delta ^= gf32::mul(lambda[i], synd[iter - i]);
    }
    if (delta == 0) {
      ++m;
      continue;
    }
    std::vector<uint8_t> adjust(prev.size() + m, 0);
    uint8_t scale = gf32::mul(delta, gf32::inv(b));
    for (size_t i = 0; i < prev.size(); ++i) adjust[i + m] = gf32::mul(prev[i], scale);
    if (2 * L <= iter - 1) {
      std::vector<uint8_t> old = lambda;
      if (adjust.size() > lambda.size()) lambda.resize(adjust.size(), 0);
      for (size_t i = 0; i < adjust.size(); ++i) lambda[i] ^= adjust[i];
      prev = std::move(old);
      L = iter - L;
      b = delta;
      m = 1;
    } else {
      if (adjust.size() > lambda.size()) lambda.resize(adjust.size(), 0);
      for (size_t i = 0; i < adjust.size(); ++i) lambda[i] ^= adjust[i];
      ++m;
    }
  }
  while (!lambda.empty() && lambda.back() == 0) lambda.pop_back();
  int deg = static_cast<int>(lambda.size()) - 1;
  if (L > t || deg != L) return res;  // beyond correction radius

  // Chien search over symbol degrees d = 30 - index; locator X = alpha^d.
  std::vector<int> error_degrees;
  for (int d = 0; d <= 30; ++d) {
    uint8_t x_inv = gf32::pow_alpha(-d);
    uint8_t acc = 0;
    uint8_t xp = 1;
    for (size_t i = 0; i < lambda.size(); ++i) {
      acc ^= gf32::mul(lambda[i], xp);
      xp = gf32::mul(xp, x_inv);
    }
    if (acc == 0) error_degrees.push_back(d);
  }
  if (static_cast<int>(error_degrees.size()) != L) return res;

  // Forney: omega(x) = S(x) * lambda(x) mod x^(n-k), S(x) = sum S_j x^(j-1).
  std::vector<uint8_t> omega(nk, 0);
  for (int i = 0; i < nk; ++i) {
    for (size_t j = 0; j < lambda.size() && i + j < static_cast<size_t>(nk); ++j) {
      omega[i + j] ^= gf32::mul(synd[i + 1], lambda[j]);
    }
  }

  std::array<uint8_t, 31> corrected = received;
  for (int d : error_degrees) {
    uint8_t x_inv = gf32::pow_alpha(-d);
    // omega(X^-1)
    uint8_t om = 0;
    uint8_t xp = 1;
    for (int i = 0; i < nk; ++i) {
      om ^= gf32::mul(omega[i], xp);
      xp = gf32::mul(xp, x_inv);
    }
    // lambda'(X^-1): odd-degree terms only in characteristic 2.
    uint8_t lp = 0;
    for (size_t i = 1; i < lambda.size(); i += 2) {
      uint8_t term = lambda[i];
      uint8_t xpow = 1;
      for (size_t e = 0; e + 1 < i; ++e) xpow = gf32::mul(xpow, x_inv);
      lp ^= gf32::mul(term, xpow);
    }
    if (lp == 0) return res;
    uint8_t magnitude = gf32::mul(om, gf32::inv(lp));
    corrected[30 - d] ^= magnitude;
  }

  // Recheck: all syndromes of the corrected word must vanish.
  std::vector<uint8_t> cpoly(corrected.begin(), corrected.end());
  for (int j = 1; j <= nk; ++j) {
    if (poly_eval(cpoly, gf32::pow_alpha(j)) != 0) return res;
  }
  res.msg.assign(corrected.begin(), corrected.begin() + k_);
  res.corrected = L;
  res.ok = true;
  return res;
}

std::vector<std::array<uint8_t, 31>> payload_pack(const BitVec& payload, const RsCode& code) {
  if (payload.empty()) throw Error("payload_pack: empty payload");
  const int bits_per_msg = 5 * code.k();
  size_t nmsgs = (payload.size() + bits_per_msg - 1) / bits_per_msg;
  std::vector<std::array<uint8_t, 31>> out;
  out.reserve(nmsgs);
  for (size_t m = 0; m < nmsgs; ++m) {
    std::vector<uint8_t> msg(code.k(), 0);
    for (int i = 0; i < bits_per_msg; ++i) {
      size_t bit_idx = m * bits_per_msg + i;
      int bit = bit_idx < payload.size() ? payload[bit_idx] : 0;  // zero padding
      msg[i / 5] = static_cast<uint8_t>((msg[i / 5] << 1) | bit);
    }
    out.push_back(code.encode(msg));
  }
  return out;
}

BitVec payload_unpack(const std::vector<std::vector<uint8_t>>& msgs, size_t payload_bits,
                      const RsCode& code) {
  if (payload_bits == 0) throw Error("payload_unpack: zero-length payload");
  const size_t bits_per_msg = 5 * static_cast<size_t>(code.k());
  if (msgs.size() * bits_per_msg < payload_bits) {
    throw Error("payload_unpack: not enough message symbols");
  }
  BitVec out;
  out.reserve(payload_bits);
  for (const auto& msg : msgs) {
    for (uint8_t sym : msg) {
      for (int b = 4; b >= 0; --b) {
        if (out.size() == payload_bits) return out;
        out.push_back(static_cast<uint8_t>((sym >> b) & 1u));
      }
    }
    if (out.size() >= payload_bits) break;
  }
  out.resize(payload_bits);
  return out;
}

BitVec codeword_to_bits(const std::array<uint8_t, 31>& cw) {
  BitVec bits;
  bits.reserve(155);
  for (uint8_t sym : cw) {
    for (int b = 4; b >= 0; --b) bits.push_back(static_cast<uint8_t>((sym >> b) & 1u));
  }
  return bits;
}

std::array<uint8_t, 31> bits_to_codeword(const BitVec& bits, size_t offset) {
  if (offset + 155 > bits.size()) throw Error("bits_to_codeword: out of range");
  std::array<uint8_t, 31> cw{};
  for (int s = 0; s < 31; ++s) {
    uint8_t sym = 0;
    for (int b = 0; b < 5; ++b) {
      sym = static_cast<uint8_t>((sym << 1) | bits[offset + s * 5 + b]);
    }
    cw[s] = sym;
  }
  return cw;
}

}  // namespace rwmark
