#include "rwmark/metrics.hpp"

#include <array>
#include <cmath>

#include "rwmark/cipher.hpp"
#include "rwmark/errors.hpp"

namespace rwmark {

double ber(const BitVec& a, const BitVec& b) {
  if (a.size() != b.size()) throw Error("ber: length mismatch");
  if (a.empty()) throw Error("ber: empty streams");
  size_t diff = 0;
  for (size_t i = 0; i < a.size(); ++i) diff += a[i] != b[i];
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

double entropy(const GrayImage& img) {
  if (img.data.empty()) throw Error("entropy: empty image");
  std::array<uint64_t, 256> hist{};
  for (uint8_t v : img.data) ++hist[v];
  double n = static_cast<double>(img.data.size());
  double h = 0.0;
  for (uint64_t count : hist) {
    if (count == 0) continue;
    double p = count / n;
    h -= p * std::log2(p);
  }
  return h;
}

namespace {

struct PairStep {
  int dr, dc;
};

PairStep step_for(Adjacency dir) {
  switch (dir) {
    case Adjacency::Horizontal: return {0, 1};
    case Adjacency::Vertical: return {1, 0};
    default: return {1, 1};
  }
}

Correlation pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, syy = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double dx = xs[i] - mx, dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return {0.0, true};
  return {sxy / std::sqrt(sxx * syy), false};
}

}  // namespace

Correlation adjacent_correlation(const GrayImage& img, Adjacency dir, size_t sample_count,
                                 uint64_t seed) {
  PairStep st = step_for(dir);
  int max_r = img.height - st.dr;
  int max_c = img.width - st.dc;
  if (max_r <= 0 || max_c <= 0) throw Error("adjacent_correlation: image too small");

  std::vector<double> xs, ys;
  if (sample_count == 0) {
    xs.reserve(static_cast<size_t>(max_r) * max_c);
    ys.reserve(static_cast<size_t>(max_r) * max_c);
    for (int r = 0; r < max_r; ++r) {
      for (int c = 0; c < max_c; ++c) {
        xs.push_back(img.at(r, c));
        ys.push_back(img.at(r + st.dr, c + st.dc));
      }
    }
  } else {
    if (sample_count < 2) throw Error("adjacent_correlation: need at least 2 samples");
    KeyedPrng prng(seed);
    xs.reserve(sample_count);
    ys.reserve(sample_count);
    for (size_t i = 0; i < sample_count; ++i) {
      int r = static_cast<int>(prng.uniform_below(max_r));
      int c = static_cast<int>(prng.uniform_below(max_c));
      xs.push_back(img.at(r, c));
      ys.push_back(img.at(r + st.dr, c + st.dc));
    }
  }
  return pearson(xs, ys);
}

double npcr(const GrayImage& a, const GrayImage& b) {
  if (a.height != b.height || a.width != b.width) throw Error("npcr: dimension mismatch");
  if (a.data.empty()) throw Error("npcr: empty image");
  size_t diff = 0;
  for (size_t i = 0; i < a.data.size(); ++i) diff += a.data[i] != b.data[i];
  return static_cast<double>(diff) / static_cast<double>(a.data.size());
}

namespace {

double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(MSB flips | pixel = x) under N(0, sigma^2) noise, decision boundary 127.5.
double flip_term(int x, double sigma) {
  double z = (127.5 - x) / sigma;
  return x <= 127 ? 1.0 - std_normal_cdf(z) : std_normal_cdf(z);
}

}  // namespace

double flip_prob_analytic(const FlipModelParams& params) {
  if (params.sigma <= 0.0) return 0.0;
  double sum = 0.0;
  int count = 0;
  if (params.scheme == EmbedScheme::MsbOnly) {
    for (int x = 0; x <= 255; ++x) {
      sum += flip_term(x, params.sigma);
      ++count;
    }
  } else {
    for (int x = 0; x <= 63; ++x) {
      sum += flip_term(x, params.sigma);
      ++count;
    }
    for (int x = 192; x <= 255; ++x) {
      sum += flip_term(x, params.sigma);
      ++count;
    }
  }
  return sum / count;
}

MonteCarloEstimate flip_prob_montecarlo(const FlipModelParams& params, size_t trials,
                                        uint64_t seed) {
  if (trials == 0) throw Error("flip_prob_montecarlo: trials must be >= 1");
  KeyedPrng prng(seed);
  size_t flips = 0;
  for (size_t i = 0; i < trials; ++i) {
    int x;
    if (params.scheme == EmbedScheme::MsbOnly) {
      x = static_cast<int>(prng.uniform_below(256));
    } else {
      int v = static_cast<int>(prng.uniform_below(128));
      x = v < 64 ? v : v + 128;
    }
    double noisy = x + prng.normal() * params.sigma;
    long y = std::lround(noisy);  // nearest, ties away from zero
    if (y < 0) y = 0;
    if (y > 255) y = 255;
    if ((y >= 128) != (x >= 128)) ++flips;
  }
  MonteCarloEstimate est;
  est.trials = trials;
  est.p = static_cast<double>(flips) / static_cast<double>(trials);
  est.std_error = std::sqrt(est.p * (1.0 - est.p) / static_cast<double>(trials));
  return est;
}

}  // namespace rwmark
