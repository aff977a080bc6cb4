#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "roomac/signal.hpp"

namespace roomac::spectral {

// SPL assigned to digital full scale; the shared level convention for
// loudness, Bark band levels and tonality.
inline constexpr double kFullScaleDb = 94.0;

// One-sided spectrum. mags holds per-component peak amplitudes (a bin-aligned
// sine of amplitude A shows up as mags ~ A at its bin).
struct Spectrum {
  std::vector<double> freqs;   // Hz, ascending, uniform spacing
  std::vector<double> mags;    // linear amplitude >= 0
  std::vector<double> phases;  // radians in (-pi, pi]; empty when not retained

  double bin_width() const { return freqs.size() > 1 ? freqs[1] - freqs[0] : 0.0; }
};

struct Spectrogram {
  std::vector<double> freqs;                // shared axis for all frames
  std::vector<std::vector<double>> mags;    // [frame][bin]
  std::vector<std::vector<double>> phases;  // [frame][bin]
  double hop_seconds = 0.0;
  int window_len = 0;
  std::string window = "hann";

  std::size_t frame_count() const { return mags.size(); }
};

// Band-integrated levels over the 24 critical bands.
struct BarkBands {
  std::array<double, 24> levels{};    // dB-like, clamped at a 0 floor
  std::array<double, 24> energies{};  // linear: sum of mags^2 within the band
};

// Critical-band edges in Hz (24 bands, 25 edges).
inline constexpr std::array<double, 25> kBarkEdgesHz = {
    20,   100,  200,  300,  400,  510,  630,  770,  920,   1080,  1270,  1480, 1720,
    2000, 2320, 2700, 3150, 3700, 4400, 5300, 6400, 7700,  9500,  12000, 15500};

// Zwicker/Terhardt critical-band rate in Bark.
double bark_of_hz(double f);
// Critical bandwidth in Hz around frequency f.
double critical_bandwidth_hz(double f);
// 0-based band index for a frequency, or -1 outside the 20 Hz - 15.5 kHz range.
int bark_band_of(double f);

// One-sided amplitude spectrum of the whole signal (rectangular window).
Spectrum magnitude_spectrum(const Signal& mono);

// Hann-windowed short-time transform with retained phases. Frame count is
// floor((N - window_len)/hop) + 1.
Spectrogram stft(const Signal& mono, int window_len, int hop);

struct Partial {
  double freq;
  double amp;
};
using PartialList = std::vector<Partial>;

// Local maxima (strict left, weak right) with mags >= threshold_rel * max,
// strongest first, at most max_partials entries. Throws on all-zero input.
PartialList extract_partials(const Spectrum& spectrum, double threshold_rel = 1e-4,
                             std::size_t max_partials = 256);

std::array<double, 24> bark_band_energies(const Spectrum& spectrum);
BarkBands bark_band_levels(const Spectrum& spectrum, double full_scale_db = kFullScaleDb);

}  // namespace roomac::spectral
