#pragma once

#include <cstddef>
#include <vector>

#include "roomac/signal.hpp"

namespace roomac::complexity {

struct EmbeddingConfig {
  // Delay in samples; 0 selects the first zero crossing of the signal
  // autocorrelation, clamped to >= 3.
  int delay = 0;
  int depth = 10;               // embedding dimension M
  std::size_t max_points = 5000;  // subsample cap for the O(N^2) histogram
  double q_lo = 0.05;           // scaling-region fit bounds as distance quantiles
  double q_hi = 0.5;
};

struct CorrelationIntegral {
  std::vector<double> radii;   // log-spaced grid
  std::vector<double> values;  // C(r), non-decreasing, ~1 at the largest radius
  int delay_used = 0;
  std::size_t points = 0;  // embedded vectors after subsampling
};

// Pairwise-distance histogram of the delay embedding, normalized by N^2.
CorrelationIntegral correlation_integral(const Signal& mono, const EmbeddingConfig& cfg = {});

// Least-squares slope of log C(r) vs log r between the q_lo and q_hi
// distance quantiles, with a plateau check on the local slope.
double correlation_dimension(const Signal& mono, const EmbeddingConfig& cfg = {});

struct StftConfig {
  int window_len = 1024;
  int hop = 512;
};

// Magnitude-weighted second difference of the unwrapped STFT phase, summed
// over time and frequency and normalized by the total magnitude, so the
// result is amplitude-scale invariant.
double echo_density(const Signal& mono, const StftConfig& cfg = {});

}  // namespace roomac::complexity
