#pragma once

#include <string>
#include <vector>

#include "roomac/signal.hpp"
#include "roomac/spectral.hpp"

namespace roomac::psycho {

// 10^(-94/20): digital full scale maps to 94 dB SPL by default.
inline constexpr double kDefaultAmplitudeRef = 1.9952623149688797e-05;

// Amplitude-weighted mean frequency of the one-sided spectrum.
// Throws on silent input.
double spectral_centroid(const spectral::Spectrum& spectrum);

// Pairwise beating roughness: sum over all unordered partial pairs of
// A1*A2 * (|df| / (f_r/e)) * exp(-|df|/f_r) with f_r = 33 Hz.
double roughness_hb(const spectral::PartialList& partials);

// S = 0.11 * sum(L_B * g_B * B) / sum(L_B) acum, with g_B = 1 below band 15
// and 0.066*exp(0.171*B) from band 15 up (1-based band index B).
double sharpness(const spectral::BarkBands& bands);

struct LoudnessConfig {
  double amplitude_ref = kDefaultAmplitudeRef;
  // Literal reading places 1/N outside the square root, making the value
  // depend on duration; default is the duration-invariant RMS reading.
  bool literal_mean_outside_root = false;
  double floor_db = -120.0;
};

// 20*log10(rms/amplitude_ref); stereo input is measured per channel and the
// dB values averaged. All-zero input returns floor_db.
double loudness(const Signal& signal, const LoudnessConfig& config = {});

// Envelope-modulation roughness per critical band (modulation range
// 20-170 Hz, weighting peaked at 70 Hz), calibrated so a 1 kHz carrier at
// 60 dB with 100% AM at 70 Hz gives 1.0.
double roughness_sottek(const Signal& mono);

// Same machinery with the weighting peaked at 4 Hz over 0.25-20 Hz,
// calibrated to 1.0 for the 1 kHz / 60 dB / 100% AM at 4 Hz reference.
double fluctuation_strength(const Signal& mono);

enum class NeighborSet {
  AsPrinted,  // j in {-1, -2, +1, +3}
  Symmetric,  // j in {-3, -2, +2, +3}
};

struct TonalityConfig {
  NeighborSet neighbors = NeighborSet::AsPrinted;
  double full_scale_db = spectral::kFullScaleDb;
  double prominence_db = 7.0;
};

// Aures-style tonality in tu: dominant lines confirmed by the 7 dB neighbor
// criterion plus sub-critical-bandwidth narrowband components, combined with
// bandwidth/level-excess/frequency weights and the tonal-to-noise energy
// relation, calibrated so a 1 kHz sine at 60 dB gives 1.0. Silence gives 0.
double tonality(const spectral::Spectrum& spectrum, const TonalityConfig& config = {});

// One row of the feature table; columns follow the fixed CSV order
// stimulus, N, S, R_S, R_B, F, K, C, RT30, RT20, EDT, E, D.
struct FeatureVector {
  std::string stimulus;
  double loudness_db = 0;         // N
  double sharpness_acum = 0;      // S
  double roughness_sottek = 0;    // R_S
  double roughness_hb = 0;        // R_B
  double fluctuation = 0;         // F
  double tonality_tu = 0;         // K
  double centroid_hz = 0;         // C
  double rt30_s = 0;              // RT30
  double rt20_s = 0;              // RT20
  double edt_s = 0;               // EDT
  double echo_density = 0;        // E
  double correlation_dim = 0;     // D
};

struct FeatureTable {
  std::vector<FeatureVector> rows;
};

extern const char* const kFeatureCsvHeader;

std::string feature_table_to_csv(const FeatureTable& table);
FeatureTable feature_table_from_csv(const std::string& text);

}  // namespace roomac::psycho
