#include "rwmark/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "rwmark/cipher.hpp"
#include "rwmark/errors.hpp"

namespace rwmark {

namespace {

// Bilinear value noise on a coarse grid of the given cell size.
void add_octave(std::vector<double>& acc, int h, int w, int cell, double amplitude,
                KeyedPrng& prng) {
  int gh = h / cell + 2, gw = w / cell + 2;
  std::vector<double> grid(static_cast<size_t>(gh) * gw);
  for (auto& g : grid) g = prng.unit_double() * 2.0 - 1.0;
  for (int r = 0; r < h; ++r) {
    double fr = static_cast<double>(r) / cell;
    int r0 = static_cast<int>(fr);
    double tr = fr - r0;
    for (int c = 0; c < w; ++c) {
      double fc = static_cast<double>(c) / cell;
      int c0 = static_cast<int>(fc);
      double tc = fc - c0;
      double g00 = grid[static_cast<size_t>(r0) * gw + c0];
      double g01 = grid[static_cast<size_t>(r0) * gw + c0 + 1];
      double g10 = grid[static_cast<size_t>(r0 + 1) * gw + c0];
      double g11 = grid[static_cast<size_t>(r0 + 1) * gw + c0 + 1];
      double top = g00 + (g01 - g00) * tc;
      double bot = g10 + (g11 - g10) * tc;
      acc[static_cast<size_t>(r) * w + c] += amplitude * (top + (bot - top) * tr);
    }
  }
}

}  // namespace

GrayImage synth_natural(int height, int width, uint64_t seed, double grain) {
  if (height <= 0 || width <= 0) throw Error("synth_natural: bad dimensions");
  KeyedPrng prng(seed);
  std::vector<double> acc(static_cast<size_t>(height) * width, 0.0);

  int max_dim = std::max(height, width);
  double amplitude = 70.0;
  for (int cell = max_dim / 2; cell >= 2; cell /= 2) {
    add_octave(acc, height, width, cell, amplitude, prng);
    amplitude *= 0.55;
  }

  // A few soft elliptical blobs for larger-scale structure.
  int nblobs = 3 + static_cast<int>(prng.uniform_below(4));
  for (int b = 0; b < nblobs; ++b) {
    double cr = prng.unit_double() * height;
    double cc = prng.unit_double() * width;
    double rr = (0.1 + 0.3 * prng.unit_double()) * height;
    double rc = (0.1 + 0.3 * prng.unit_double()) * width;
    double mag = (prng.unit_double() * 2.0 - 1.0) * 60.0;
    for (int r = 0; r < height; ++r) {
      double dr = (r - cr) / rr;
      for (int c = 0; c < width; ++c) {
        double dc = (c - cc) / rc;
        double d2 = dr * dr + dc * dc;
        if (d2 < 4.0) acc[static_cast<size_t>(r) * width + c] += mag * std::exp(-d2);
      }
    }
  }

  if (grain > 0.0) {
    for (auto& v : acc) v += prng.normal() * grain;
  }

  GrayImage img = make_image(height, width);
  for (size_t i = 0; i < acc.size(); ++i) {
    long v = std::lround(128.0 + acc[i]);
    img.data[i] = static_cast<uint8_t>(std::clamp<long>(v, 0, 255));
  }
  return img;
}

GrayImage histogram_specify(const GrayImage& src, const std::array<uint64_t, 256>& target_hist) {
  size_t n = src.pixel_count();
  uint64_t total = std::accumulate(target_hist.begin(), target_hist.end(), uint64_t{0});
  if (total != n) throw Error("histogram_specify: counts must sum to the pixel count");

  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return src.data[a] < src.data[b];
  });

  GrayImage out = make_image(src.height, src.width);
  size_t idx = 0;
  for (int v = 0; v < 256; ++v) {
    for (uint64_t c = 0; c < target_hist[v]; ++c) {
      out.data[order[idx++]] = static_cast<uint8_t>(v);
    }
  }
  return out;
}

namespace {

double int_hist_entropy(const std::array<uint64_t, 256>& hist, size_t n) {
  double e = 0.0;
  for (uint64_t c : hist) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(n);
    e -= p * std::log2(p);
  }
  return e;
}

// Bimodal density with a width parameter; wider -> higher entropy.
std::array<uint64_t, 256> histogram_for_width(size_t n, double width) {
  std::array<double, 256> density;
  double s1 = 18.0 * width, s2 = 26.0 * width;
  for (int i = 0; i < 256; ++i) {
    double d1 = (i - 78.0) / s1;
    double d2 = (i - 165.0) / s2;
    density[i] = 0.55 * std::exp(-0.5 * d1 * d1) + 0.45 * std::exp(-0.5 * d2 * d2) + 1e-9;
  }
  double sum = std::accumulate(density.begin(), density.end(), 0.0);

  // Largest-remainder rounding to integer counts summing to n.
  std::array<uint64_t, 256> hist{};
  std::array<double, 256> remainder;
  uint64_t assigned = 0;
  for (int i = 0; i < 256; ++i) {
    double exact = density[i] / sum * static_cast<double>(n);
    hist[i] = static_cast<uint64_t>(exact);
    remainder[i] = exact - static_cast<double>(hist[i]);
    assigned += hist[i];
  }
  std::array<int, 256> by_rem;
  std::iota(by_rem.begin(), by_rem.end(), 0);
  std::stable_sort(by_rem.begin(), by_rem.end(),
                   [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (uint64_t i = 0; assigned < n; ++i, ++assigned) {
    ++hist[by_rem[i % 256]];
  }
  return hist;
}

}  // namespace

std::array<uint64_t, 256> entropy_tuned_histogram(size_t pixel_count, double target_entropy,
                                                  double tol) {
  double lo = 0.05, hi = 6.0;
  std::array<uint64_t, 256> best{};
  double best_err = 1e9;
  for (int iter = 0; iter < 80; ++iter) {
    double mid = 0.5 * (lo + hi);
    auto hist = histogram_for_width(pixel_count, mid);
    double e = int_hist_entropy(hist, pixel_count);
    double err = std::abs(e - target_entropy);
    if (err < best_err) {
      best_err = err;
      best = hist;
    }
    if (err <= tol * 0.5) break;
    if (e < target_entropy) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (best_err > tol) throw Error("entropy_tuned_histogram: did not converge");
  return best;
}

GrayImage synth_baboon_like(uint64_t seed) {
  GrayImage base = synth_natural(512, 512, seed, 6.0);
  auto hist = entropy_tuned_histogram(base.pixel_count(), 7.3583, 0.0005);
  return histogram_specify(base, hist);
}

}  // namespace rwmark
