#include <cmath>
#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "roomac/audio_io.hpp"
#include "roomac/spectral.hpp"

using namespace roomac;
using spectral::Spectrum;

namespace {

// Time-domain energy implied by a one-sided peak-amplitude spectrum of an
// n-sample signal: sum x^2 = n * (sum of per-component mean squares).
double spectrum_energy(const Spectrum& s, std::size_t n) {
  double total = 0.0;
  for (std::size_t k = 0; k < s.mags.size(); ++k) {
    const bool single = (k == 0) || (n % 2 == 0 && k == n / 2);
    total += single ? s.mags[k] * s.mags[k] : 0.5 * s.mags[k] * s.mags[k];
  }
  return total * static_cast<double>(n);
}

double signal_energy(const std::vector<double>& x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("pure tone concentrates in one bin") {
  const Signal s = audio::synth_tone(440.0, 1.0, 48000, 0.8);
  const auto spec = spectral::magnitude_spectrum(s);
  std::size_t peak = 0;
  for (std::size_t k = 1; k < spec.mags.size(); ++k)
    if (spec.mags[k] > spec.mags[peak]) peak = k;
  CHECK(std::abs(spec.freqs[peak] - 440.0) <= spec.bin_width());
  CHECK(spec.mags[peak] == doctest::Approx(0.8).epsilon(1e-6));
}

TEST_CASE("DC signal has all energy in bin 0") {
  const Signal s = make_mono(std::vector<double>(1000, 0.5), 48000);
  const auto spec = spectral::magnitude_spectrum(s);
  CHECK(spec.mags[0] == doctest::Approx(0.5).epsilon(1e-12));
  for (std::size_t k = 1; k < spec.mags.size(); ++k)
    CHECK(spec.mags[k] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("Parseval consistency on white noise") {
  const Signal s = audio::synth_white_noise(0.7, 44100, 31, 0.3);
  const auto spec = spectral::magnitude_spectrum(s);
  const double e_time = signal_energy(s.channels[0]);
  const double e_freq = spectrum_energy(spec, s.length());
  CHECK(std::abs(e_time - e_freq) / e_time < 1e-6);
}

TEST_CASE("empty input is rejected") {
  Signal s;
  s.sample_rate = 48000;
  s.channels.push_back({});
  CHECK_THROWS_AS(spectral::magnitude_spectrum(s), std::invalid_argument);
}

TEST_CASE("stft frame-count arithmetic") {
  const Signal s = make_mono(test_helpers::random_vector(4096, 32), 48000);
  const auto sg = spectral::stft(s, 1024, 512);
  CHECK(sg.frame_count() == 7);
  CHECK(sg.freqs.size() == 513);

  const Signal exact = make_mono(test_helpers::random_vector(1024, 33), 48000);
  CHECK(spectral::stft(exact, 1024, 512).frame_count() == 1);

  const Signal tiny = make_mono(test_helpers::random_vector(512, 34), 48000);
  CHECK_THROWS_WITH_AS(spectral::stft(tiny, 1024, 512), doctest::Contains("shorter"),
                       std::invalid_argument);
}

TEST_CASE("stft phase of a bin-aligned sine advances by the analytic increment") {
  const int sr = 48000, window = 1024, hop = 512;
  const int bin = 63;  // odd bin: increment pi mod 2pi, catches sign errors
  const double freq = static_cast<double>(bin) * sr / window;
  const Signal s = audio::synth_tone(freq, 0.5, sr, 0.9);
  const auto sg = spectral::stft(s, window, hop);
  const double expected = 2.0 * std::numbers::pi * freq * hop / sr;
  for (std::size_t f = 1; f < sg.frame_count(); ++f) {
    double d = sg.phases[f][bin] - sg.phases[f - 1][bin] - expected;
    d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
    CHECK(std::abs(d) < 1e-6);
  }
}

TEST_CASE("stft of stationary noise keeps ~3/4 of the energy at 50% Hann overlap") {
  const int window = 1024, hop = 512;
  const Signal s = audio::synth_white_noise(1.0, 48000, 35, 0.5);
  const auto sg = spectral::stft(s, window, hop);

  // Reconstruct per-frame windowed energy from the documented scaling
  // (mags = 2|X|/sum(w)), then compare against 0.75 * signal energy.
  double window_sum = 0.0;
  for (int i = 0; i < window; ++i)
    window_sum += 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / window);
  double total = 0.0;
  for (std::size_t f = 0; f < sg.frame_count(); ++f) {
    for (std::size_t k = 0; k < sg.freqs.size(); ++k) {
      const bool single = (k == 0) || (k == sg.freqs.size() - 1);
      const double amp2 = sg.mags[f][k] * sg.mags[f][k] * window_sum * window_sum;
      total += (single ? amp2 : amp2 / 2.0) / window;
    }
  }
  CHECK(total == doctest::Approx(0.75 * signal_energy(s.channels[0])).epsilon(0.05));
}

TEST_CASE("extract_partials finds constructed peaks strongest-first") {
  Signal two = audio::synth_tone(440.0, 1.0, 48000, 1.0);
  const Signal other = audio::synth_tone(660.0, 1.0, 48000, 0.5);
  for (std::size_t i = 0; i < two.length(); ++i) two.channels[0][i] += other.channels[0][i];
  const auto spec = spectral::magnitude_spectrum(two);

  auto partials = spectral::extract_partials(spec, 0.1, 256);
  REQUIRE(partials.size() == 2);
  CHECK(partials[0].freq == doctest::Approx(440.0).epsilon(1e-9));
  CHECK(partials[1].freq == doctest::Approx(660.0).epsilon(1e-9));

  partials = spectral::extract_partials(spec, 0.6, 256);
  REQUIRE(partials.size() == 1);
  CHECK(partials[0].freq == doctest::Approx(440.0).epsilon(1e-9));
}

TEST_CASE("extract_partials respects the cap and rejects silence") {
  const Signal noise = audio::synth_white_noise(0.25, 48000, 36, 0.5);
  const auto spec = spectral::magnitude_spectrum(noise);
  CHECK(spectral::extract_partials(spec, 1e-4, 10).size() <= 10);

  Spectrum silent;
  silent.freqs = {0, 1, 2, 3};
  silent.mags = {0, 0, 0, 0};
  CHECK_THROWS_WITH_AS(spectral::extract_partials(silent), doctest::Contains("silent"),
                       std::invalid_argument);
}

TEST_CASE("partials are local maxima sorted by amplitude") {
  const Signal noise = audio::synth_white_noise(0.25, 48000, 37, 0.5);
  const auto spec = spectral::magnitude_spectrum(noise);
  const auto partials = spectral::extract_partials(spec, 1e-3, 1000);
  REQUIRE(!partials.empty());
  for (std::size_t p = 1; p < partials.size(); ++p) CHECK(partials[p - 1].amp >= partials[p].amp);
  for (const auto& partial : partials) {
    const auto k =
        static_cast<std::size_t>(std::llround(partial.freq / spec.bin_width()));
    REQUIRE(k > 0);
    REQUIRE(k + 1 < spec.mags.size());
    CHECK(spec.mags[k - 1] < spec.mags[k]);
    CHECK(spec.mags[k] >= spec.mags[k + 1]);
  }
}

TEST_CASE("narrowband noise lands in its critical band") {
  // Bin-aligned sines strictly inside band 9 (920-1080 Hz).
  std::vector<double> x(48000, 0.0);
  std::mt19937_64 rng(38);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  for (int f = 960; f <= 1040; f += 4) {
    const double p = phase(rng);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] += 0.02 * std::sin(2.0 * std::numbers::pi * f * i / 48000.0 + p);
  }
  const auto spec = spectral::magnitude_spectrum(make_mono(x, 48000));
  const auto energies = spectral::bark_band_energies(spec);
  double total = 0.0;
  for (double e : energies) total += e;
  CHECK(energies[8] / total > 0.9);
}

TEST_CASE("silence yields all-zero bands; two tones occupy exactly two bands") {
  Spectrum silent;
  for (int k = 0; k < 100; ++k) {
    silent.freqs.push_back(k * 100.0);
    silent.mags.push_back(0.0);
  }
  const auto silent_bands = spectral::bark_band_levels(silent);
  for (double level : silent_bands.levels) CHECK(level == 0.0);

  Signal tones = audio::synth_tone(100.0, 1.0, 48000, 0.5);
  const Signal hi = audio::synth_tone(10000.0, 1.0, 48000, 0.5);
  for (std::size_t i = 0; i < tones.length(); ++i) tones.channels[0][i] += hi.channels[0][i];
  const auto bands = spectral::bark_band_levels(spectral::magnitude_spectrum(tones));
  int nonzero = 0;
  for (double level : bands.levels) nonzero += level > 0.0;
  CHECK(nonzero == 2);
  CHECK(bands.levels[spectral::bark_band_of(100.0)] > 0.0);
  CHECK(bands.levels[spectral::bark_band_of(10000.0)] > 0.0);
}

TEST_CASE("band energies conserve the in-range spectrum energy") {
  const Signal noise = audio::synth_white_noise(0.5, 48000, 39, 0.4);
  const auto spec = spectral::magnitude_spectrum(noise);
  const auto energies = spectral::bark_band_energies(spec);
  double in_bands = 0.0;
  for (double e : energies) in_bands += e;
  double in_range = 0.0;
  for (std::size_t k = 0; k < spec.freqs.size(); ++k)
    if (spec.freqs[k] >= spectral::kBarkEdgesHz.front() &&
        spec.freqs[k] < spectral::kBarkEdgesHz.back())
      in_range += spec.mags[k] * spec.mags[k];
  CHECK(std::abs(in_bands - in_range) / in_range < 1e-6);
}

}  // TEST_SUITE
