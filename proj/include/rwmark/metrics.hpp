#pragma once

#include <cstdint>
#include <cstddef>

#include "rwmark/bits.hpp"
#include "rwmark/image.hpp"

namespace rwmark {

// Bit-error rate: Hamming distance / length. Lengths must match.
double ber(const BitVec& a, const BitVec& b);

// Shannon entropy of the 256-bin intensity histogram, bits per pixel.
double entropy(const GrayImage& img);

enum class Adjacency { Horizontal, Vertical, Diagonal };

struct Correlation {
  double value = 0.0;
  bool degenerate = false;  // zero-variance sample
};

// Pearson correlation over adjacent pixel pairs. sample_count == 0 uses the
// full population; otherwise pairs are drawn with the seeded generator.
Correlation adjacent_correlation(const GrayImage& img, Adjacency dir, size_t sample_count,
                                 uint64_t seed);

// Fraction of positions whose values differ.
double npcr(const GrayImage& a, const GrayImage& b);

enum class EmbedScheme { MsbOnly, DualMsbs };

struct FlipModelParams {
  double sigma = 0.0;  // pixel-domain noise standard deviation
  EmbedScheme scheme = EmbedScheme::DualMsbs;
};

// Closed-form MSB flip probability under additive Gaussian noise:
// averages 1 - Phi((127.5 - x) / sigma) (or its complement above 127.5) over
// the scheme's pixel support: [0,255] for MSB-only, [0,63] u [192,255] for
// dual-MSBs.
double flip_prob_analytic(const FlipModelParams& params);

struct MonteCarloEstimate {
  double p = 0.0;
  double std_error = 0.0;
  size_t trials = 0;
};

// Simulation including rounding and clipping, which the closed form ignores.
MonteCarloEstimate flip_prob_montecarlo(const FlipModelParams& params, size_t trials,
                                        uint64_t seed);

}  // namespace rwmark
