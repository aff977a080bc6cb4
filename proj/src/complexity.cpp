#include "roomac/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"
#include "roomac/spectral.hpp"

namespace roomac::complexity {

namespace {

constexpr std::size_t kHistogramBins = 96;
constexpr std::size_t kMinPoints = 1000;
constexpr double kLocalSlopeSdLimit = 0.3;
constexpr std::size_t kMinFitPoints = 5;

// First non-positive lag of the autocorrelation, the usual Takens-delay pick.
int autocorrelation_delay(const std::vector<double>& x) {
  const std::size_t n = x.size();
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);

  const std::size_t nfft = fft::next_pow2(2 * n);
  std::vector<double> padded(nfft, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = x[i] - mean;
  auto spec = fft::real_forward(padded);
  for (auto& v : spec) v = std::norm(v);
  const auto acf = fft::real_inverse(spec, nfft);

  for (std::size_t lag = 1; lag < n; ++lag)
    if (acf[lag] <= 0.0) return static_cast<int>(lag);
  return static_cast<int>(n / 4);
}

struct Embedding {
  const std::vector<double>* x;
  int delay;
  int depth;
  std::size_t stride;
  std::size_t count;

  double component(std::size_t point, int m) const {
    return (*x)[point * stride + static_cast<std::size_t>(m) * static_cast<std::size_t>(delay)];
  }
  double squared_distance(std::size_t a, std::size_t b) const {
    double d2 = 0.0;
    const std::size_t ia = a * stride, ib = b * stride;
    for (int m = 0; m < depth; ++m) {
      const std::size_t off = static_cast<std::size_t>(m) * static_cast<std::size_t>(delay);
      const double d = (*x)[ia + off] - (*x)[ib + off];
      d2 += d * d;
    }
    return d2;
  }
};

Embedding build_embedding(const std::vector<double>& x, const EmbeddingConfig& cfg, int delay) {
  if (cfg.depth < 2) throw std::invalid_argument("embedding depth must be >= 2");
  if (cfg.q_lo <= 0.0 || cfg.q_hi <= cfg.q_lo || cfg.q_hi >= 1.0)
    throw std::invalid_argument("invalid radius quantiles");
  const std::size_t span = static_cast<std::size_t>(cfg.depth - 1) * static_cast<std::size_t>(delay);
  if (x.size() <= span) throw std::invalid_argument("too few points for delay embedding");
  const std::size_t available = x.size() - span;
  const std::size_t stride = std::max<std::size_t>(1, available / cfg.max_points);
  const std::size_t count = std::min(cfg.max_points, (available + stride - 1) / stride);
  if (count < kMinPoints) throw std::invalid_argument("too few points for delay embedding");
  return {&x, delay, cfg.depth, stride, count};
}

}  // namespace

CorrelationIntegral correlation_integral(const Signal& mono, const EmbeddingConfig& cfg) {
  mono.validate();
  const std::vector<double>& x = mono.mono();
  const auto [min_it, max_it] = std::minmax_element(x.begin(), x.end());
  if (*min_it == *max_it) throw std::invalid_argument("zero variance");

  int delay = cfg.delay;
  if (delay == 0) delay = autocorrelation_delay(x);
  delay = std::max(delay, 3);
  // Keep enough embedded vectors even if the autocorrelation suggested a
  // very long delay.
  if (cfg.depth > 1) {
    const long max_delay =
        (static_cast<long>(x.size()) - static_cast<long>(kMinPoints)) / (cfg.depth - 1);
    if (max_delay >= 3) delay = std::min(delay, static_cast<int>(max_delay));
  }
  if (cfg.delay != 0 && cfg.delay < 3) throw std::invalid_argument("delay must be >= 3");

  const Embedding emb = build_embedding(x, cfg, delay);
  const std::size_t count = emb.count;

  // Pass 1: distance extremes.
  double min_d2 = std::numeric_limits<double>::infinity();
  double max_d2 = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double d2 = emb.squared_distance(i, j);
      if (d2 > 0.0 && d2 < min_d2) min_d2 = d2;
      if (d2 > max_d2) max_d2 = d2;
    }
  }
  if (!(max_d2 > 0.0)) throw std::invalid_argument("zero variance");
  if (!std::isfinite(min_d2)) min_d2 = max_d2 * 1e-12;

  const double log_lo = 0.5 * std::log(min_d2);
  const double log_hi = 0.5 * std::log(max_d2);
  const double span = std::max(log_hi - log_lo, 1e-12);

  // Pass 2: histogram of log distances; bin by upper edge.
  std::vector<std::size_t> hist(kHistogramBins, 0);
  std::size_t zero_distance_pairs = 0;
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = i + 1; j < count; ++j) {
      const double d2 = emb.squared_distance(i, j);
      if (d2 <= 0.0) {
        ++zero_distance_pairs;
        continue;
      }
      const double u = (0.5 * std::log(d2) - log_lo) / span;
      std::size_t bin = u <= 0.0 ? 0
                                 : std::min(kHistogramBins - 1,
                                            static_cast<std::size_t>(u * kHistogramBins));
      ++hist[bin];
    }
  }

  CorrelationIntegral ci;
  ci.delay_used = delay;
  ci.points = count;
  ci.radii.resize(kHistogramBins);
  ci.values.resize(kHistogramBins);
  const double n2 = static_cast<double>(count) * static_cast<double>(count);
  double cum = static_cast<double>(zero_distance_pairs);
  for (std::size_t b = 0; b < kHistogramBins; ++b) {
    cum += static_cast<double>(hist[b]);
    ci.radii[b] = std::exp(log_lo + span * static_cast<double>(b + 1) / kHistogramBins);
    ci.values[b] = 2.0 * cum / n2;  // ordered pairs, i != j
  }
  return ci;
}

namespace {

double fit_slope(const std::vector<double>& lx, const std::vector<double>& ly, std::size_t first,
                 std::size_t last) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(last - first + 1);
  for (std::size_t i = first; i <= last; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double local_slope_sd(const std::vector<double>& slopes, std::size_t first, std::size_t last) {
  double mean = 0.0;
  const double n = static_cast<double>(last - first + 1);
  for (std::size_t i = first; i <= last; ++i) mean += slopes[i];
  mean /= n;
  double var = 0.0;
  for (std::size_t i = first; i <= last; ++i) var += (slopes[i] - mean) * (slopes[i] - mean);
  return std::sqrt(var / n);
}

}  // namespace

double correlation_dimension(const Signal& mono, const EmbeddingConfig& cfg) {
  const auto ci = correlation_integral(mono, cfg);
  const double c_max = ci.values.back();

  // Grid points inside the quantile window of the distance distribution.
  std::vector<double> lx, ly;
  for (std::size_t b = 0; b < ci.radii.size(); ++b) {
    const double q = ci.values[b] / c_max;
    if (q < cfg.q_lo || q > cfg.q_hi) continue;
    if (ci.values[b] <= 0.0) continue;
    lx.push_back(std::log(ci.radii[b]));
    ly.push_back(std::log(ci.values[b]));
  }
  if (lx.size() < 2) throw std::invalid_argument("scaling region too small");
  if (lx.size() < kMinFitPoints) return fit_slope(lx, ly, 0, lx.size() - 1);

  std::vector<double> local(lx.size() - 1);
  for (std::size_t i = 0; i + 1 < lx.size(); ++i)
    local[i] = (ly[i + 1] - ly[i]) / (lx[i + 1] - lx[i]);

  if (local_slope_sd(local, 0, local.size() - 1) <= kLocalSlopeSdLimit)
    return fit_slope(lx, ly, 0, lx.size() - 1);

  // Widest contiguous sub-range with a stable local slope.
  std::size_t best_first = 0, best_last = 0;
  bool found = false;
  for (std::size_t first = 0; first + kMinFitPoints - 1 < local.size(); ++first) {
    for (std::size_t last = local.size() - 1; last >= first + kMinFitPoints - 1; --last) {
      if (found && last - first <= best_last - best_first) break;
      if (local_slope_sd(local, first, last) <= kLocalSlopeSdLimit) {
        best_first = first;
        best_last = last;
        found = true;
        break;
      }
      if (last == 0) break;
    }
  }
  if (!found) return fit_slope(lx, ly, 0, lx.size() - 1);
  return fit_slope(lx, ly, best_first, best_last + 1);
}

double echo_density(const Signal& mono, const StftConfig& cfg) {
  const auto sg = spectral::stft(mono, cfg.window_len, cfg.hop);
  const std::size_t frames = sg.frame_count();
  if (frames < 3) throw std::invalid_argument("signal too short: need at least 3 STFT frames");
  const std::size_t bins = sg.freqs.size();

  double weighted_sum = 0.0;
  double weight_total = 0.0;
  std::vector<double> phase(frames);
  for (std::size_t k = 0; k < bins; ++k) {
    // Unwrap across frames before differencing.
    phase[0] = sg.phases[0][k];
    for (std::size_t t = 1; t < frames; ++t) {
      double d = sg.phases[t][k] - sg.phases[t - 1][k];
      d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
      phase[t] = phase[t - 1] + d;
    }
    for (std::size_t t = 1; t + 1 < frames; ++t) {
      const double second_diff = phase[t + 1] - 2.0 * phase[t] + phase[t - 1];
      weighted_sum += sg.mags[t][k] * std::abs(second_diff) / (2.0 * std::numbers::pi);
    }
    for (std::size_t t = 0; t < frames; ++t) weight_total += sg.mags[t][k];
  }
  if (weight_total <= 0.0) return 0.0;
  return weighted_sum / weight_total;
}

}  // namespace roomac::complexity
