#include "roomac/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace roomac::spectral {

double bark_of_hz(double f) {
  return 13.0 * std::atan(0.00076 * f) + 3.5 * std::atan((f / 7500.0) * (f / 7500.0));
}

double critical_bandwidth_hz(double f) {
  const double khz = f / 1000.0;
  return 25.0 + 75.0 * std::pow(1.0 + 1.4 * khz * khz, 0.69);
}

int bark_band_of(double f) {
  if (f < kBarkEdgesHz.front() || f >= kBarkEdgesHz.back()) return -1;
  for (int b = 0; b < 24; ++b)
    if (f < kBarkEdgesHz[static_cast<std::size_t>(b) + 1]) return b;
  return -1;
}

Spectrum magnitude_spectrum(const Signal& mono) {
  mono.validate();
  const std::vector<double>& x = mono.mono();
  const std::size_t n = x.size();
  const auto bins = fft::real_forward(x);

  Spectrum s;
  s.freqs.resize(bins.size());
  s.mags.resize(bins.size());
  const double df = static_cast<double>(mono.sample_rate) / static_cast<double>(n);
  for (std::size_t k = 0; k < bins.size(); ++k) {
    s.freqs[k] = df * static_cast<double>(k);
    // Peak-amplitude normalization; DC and Nyquist have no mirror bin.
    const bool single = (k == 0) || (n % 2 == 0 && k == n / 2);
    s.mags[k] = std::abs(bins[k]) * (single ? 1.0 : 2.0) / static_cast<double>(n);
  }
  return s;
}

Spectrogram stft(const Signal& mono, int window_len, int hop) {
  mono.validate();
  if (window_len < 16) throw std::invalid_argument("window_len must be >= 16");
  if (hop <= 0 || hop > window_len) throw std::invalid_argument("hop must be in (0, window_len]");
  const std::vector<double>& x = mono.mono();
  const std::size_t n = x.size();
  const std::size_t w = static_cast<std::size_t>(window_len);
  if (n < w) throw std::invalid_argument("signal shorter than one window");

  std::vector<double> window(w);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < w; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(w));
    window_sum += window[i];
  }

  const std::size_t frames = (n - w) / static_cast<std::size_t>(hop) + 1;
  const std::size_t bins = w / 2 + 1;

  Spectrogram sg;
  sg.window_len = window_len;
  sg.hop_seconds = static_cast<double>(hop) / mono.sample_rate;
  sg.freqs.resize(bins);
  const double df = static_cast<double>(mono.sample_rate) / static_cast<double>(w);
  for (std::size_t k = 0; k < bins; ++k) sg.freqs[k] = df * static_cast<double>(k);

  sg.mags.resize(frames);
  sg.phases.resize(frames);
  std::vector<double> frame(w);
  for (std::size_t f = 0; f < frames; ++f) {
    const std::size_t offset = f * static_cast<std::size_t>(hop);
    for (std::size_t i = 0; i < w; ++i) frame[i] = x[offset + i] * window[i];
    const auto spec = fft::real_forward(frame);
    sg.mags[f].resize(bins);
    sg.phases[f].resize(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const bool single = (k == 0) || (w % 2 == 0 && k == w / 2);
      sg.mags[f][k] = std::abs(spec[k]) * (single ? 1.0 : 2.0) / window_sum;
      sg.phases[f][k] = std::atan2(spec[k].imag(), spec[k].real());
    }
  }
  return sg;
}

PartialList extract_partials(const Spectrum& spectrum, double threshold_rel,
                             std::size_t max_partials) {
  const auto& m = spectrum.mags;
  if (m.size() != spectrum.freqs.size()) throw std::invalid_argument("malformed spectrum");
  const double peak = m.empty() ? 0.0 : *std::max_element(m.begin(), m.end());
  if (peak <= 0.0) throw std::invalid_argument("silent input");
  const double threshold = threshold_rel * peak;

  PartialList partials;
  for (std::size_t i = 1; i + 1 < m.size(); ++i) {
    if (m[i - 1] < m[i] && m[i] >= m[i + 1] && m[i] >= threshold)
      partials.push_back({spectrum.freqs[i], m[i]});
  }
  std::stable_sort(partials.begin(), partials.end(),
                   [](const Partial& a, const Partial& b) { return a.amp > b.amp; });
  if (partials.size() > max_partials) partials.resize(max_partials);
  return partials;
}

std::array<double, 24> bark_band_energies(const Spectrum& spectrum) {
  std::array<double, 24> energies{};
  for (std::size_t k = 0; k < spectrum.freqs.size(); ++k) {
    const int b = bark_band_of(spectrum.freqs[k]);
    if (b >= 0) energies[static_cast<std::size_t>(b)] += spectrum.mags[k] * spectrum.mags[k];
  }
  return energies;
}

BarkBands bark_band_levels(const Spectrum& spectrum, double full_scale_db) {
  BarkBands bands;
  bands.energies = bark_band_energies(spectrum);
  for (std::size_t b = 0; b < 24; ++b) {
    // Energy is a sum of squared peak amplitudes; /2 converts to mean-square.
    const double mean_square = 0.5 * bands.energies[b];
    const double level =
        mean_square > 0.0 ? full_scale_db + 10.0 * std::log10(mean_square) : 0.0;
    bands.levels[b] = std::max(0.0, level);
  }
  return bands;
}

}  // namespace roomac::spectral
