#include "roomac/psychoacoustics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fft.hpp"
#include "roomac/audio_io.hpp"
#include "util.hpp"

namespace roomac::psycho {

double spectral_centroid(const spectral::Spectrum& spectrum) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < spectrum.mags.size(); ++i) {
    num += spectrum.freqs[i] * spectrum.mags[i];
    den += spectrum.mags[i];
  }
  if (den <= 0.0) throw std::invalid_argument("silent input");
  return num / den;
}

double roughness_hb(const spectral::PartialList& partials) {
  constexpr double f_r = 33.0;
  double total = 0.0;
  for (std::size_t i = 0; i < partials.size(); ++i) {
    for (std::size_t j = i + 1; j < partials.size(); ++j) {
      const double df = std::abs(partials[i].freq - partials[j].freq);
      total += partials[i].amp * partials[j].amp * (df / (f_r / std::numbers::e)) *
               std::exp(-df / f_r);
    }
  }
  return total;
}

double sharpness(const spectral::BarkBands& bands) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < bands.levels.size(); ++i) {
    const double band = static_cast<double>(i + 1);  // 1-based band index B
    const double g = band < 15.0 ? 1.0 : 0.066 * std::exp(0.171 * band);
    num += bands.levels[i] * g * band;
    den += bands.levels[i];
  }
  if (den <= 0.0) throw std::invalid_argument("silent input");
  return 0.11 * num / den;
}

double loudness(const Signal& signal, const LoudnessConfig& config) {
  signal.validate();
  if (config.amplitude_ref <= 0.0) throw std::invalid_argument("amplitude_ref must be positive");
  double db_sum = 0.0;
  for (const auto& ch : signal.channels) {
    double sumsq = 0.0;
    for (double v : ch) sumsq += v * v;
    const double n = static_cast<double>(ch.size());
    const double ref = config.amplitude_ref;
    double level;
    if (sumsq <= 0.0) {
      level = config.floor_db;
    } else if (config.literal_mean_outside_root) {
      level = 20.0 * std::log10(std::sqrt(sumsq / (ref * ref)) / n);
    } else {
      level = 20.0 * std::log10(std::sqrt(sumsq / n) / ref);
    }
    db_sum += std::max(level, config.floor_db);
  }
  return db_sum / signal.channel_count();
}

// ---------------------------------------------------------------------------
// Envelope-modulation analysis shared by roughness_sottek and
// fluctuation_strength.

namespace {

struct ModulationRange {
  double f_lo;
  double f_hi;
  double f_peak;
  double min_duration;
};

// Band-pass weighting, unity at f_peak, symmetric on a log-frequency axis.
double modulation_weight(double f, double f_peak) {
  const double u = f / f_peak + f_peak / f;
  return (2.0 / u) * (2.0 / u);
}

double modulation_metric(const Signal& mono, const ModulationRange& range) {
  mono.validate();
  if (mono.duration() < range.min_duration)
    throw std::invalid_argument("signal too short for modulation analysis (need >= " +
                                util::format_double(range.min_duration) + " s)");
  const std::vector<double>& x = mono.mono();
  const std::size_t n = x.size();
  const double df = static_cast<double>(mono.sample_rate) / static_cast<double>(n);

  std::vector<std::complex<double>> time(n);
  for (std::size_t i = 0; i < n; ++i) time[i] = x[i];
  const auto full_spec = fft::complex_forward(time);

  const std::size_t half = n / 2;
  std::array<double, 24> band_energy{};
  double total_energy = 0.0;
  for (std::size_t k = 1; k < half; ++k) {
    const int b = spectral::bark_band_of(df * static_cast<double>(k));
    if (b < 0) continue;
    const double e = std::norm(full_spec[k]);
    band_energy[static_cast<std::size_t>(b)] += e;
    total_energy += e;
  }
  if (total_energy <= 0.0) return 0.0;

  double sum_sq = 0.0;
  for (int b = 0; b < 24; ++b) {
    const double fraction = band_energy[static_cast<std::size_t>(b)] / total_energy;
    if (fraction < 1e-8) continue;

    // Analytic band signal: positive-frequency band bins doubled, rest zero.
    std::vector<std::complex<double>> masked(n, 0.0);
    const double lo = spectral::kBarkEdgesHz[static_cast<std::size_t>(b)];
    const double hi = spectral::kBarkEdgesHz[static_cast<std::size_t>(b) + 1];
    for (std::size_t k = 1; k < half; ++k) {
      const double f = df * static_cast<double>(k);
      if (f >= lo && f < hi) masked[k] = 2.0 * full_spec[k];
    }
    const auto analytic = fft::complex_inverse(masked);

    std::vector<double> envelope(n);
    double mean_env = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      envelope[i] = std::abs(analytic[i]);
      mean_env += envelope[i];
    }
    mean_env /= static_cast<double>(n);
    if (mean_env <= 0.0) continue;
    for (double& v : envelope) v -= mean_env;

    const auto mod_spec = fft::real_forward(envelope);
    double band_sq = 0.0;
    for (std::size_t k = 1; k < mod_spec.size(); ++k) {
      const double f_mod = df * static_cast<double>(k);
      if (f_mod < range.f_lo || f_mod > range.f_hi) continue;
      const double depth = 2.0 * std::abs(mod_spec[k]) / (static_cast<double>(n) * mean_env);
      const double weighted = modulation_weight(f_mod, range.f_peak) * depth;
      band_sq += weighted * weighted;
    }
    const double band_metric = fraction * std::sqrt(band_sq);
    sum_sq += band_metric * band_metric;
  }
  return std::sqrt(sum_sq);
}

constexpr ModulationRange kRoughnessRange{20.0, 170.0, 70.0, 0.5};
constexpr ModulationRange kFluctuationRange{0.25, 20.0, 4.0, 2.0};

Signal reference_am_tone(double mod_hz, double duration) {
  // 1 kHz carrier at 60 dB, 100% AM.
  return audio::synth_am_tone(1000.0, mod_hz, 1.0, duration, 48000,
                              audio::amplitude_for_db_spl(60.0));
}

double roughness_calibration() {
  static const double scale = [] {
    const double raw = modulation_metric(reference_am_tone(70.0, 1.0), kRoughnessRange);
    return 1.0 / raw;
  }();
  return scale;
}

double fluctuation_calibration() {
  static const double scale = [] {
    const double raw = modulation_metric(reference_am_tone(4.0, 2.0), kFluctuationRange);
    return 1.0 / raw;
  }();
  return scale;
}

}  // namespace

double roughness_sottek(const Signal& mono) {
  return roughness_calibration() * modulation_metric(mono, kRoughnessRange);
}

double fluctuation_strength(const Signal& mono) {
  return fluctuation_calibration() * modulation_metric(mono, kFluctuationRange);
}

// ---------------------------------------------------------------------------
// Aures-style tonality.

namespace {

constexpr double kTinyMeanSquare = 1e-30;

struct TonalComponent {
  double freq;
  double mean_square;  // component energy as mean-square amplitude
  double level_db;
  double bark_width;
};

double level_of_mean_square(double ms, double full_scale_db) {
  return full_scale_db + 10.0 * std::log10(std::max(ms, kTinyMeanSquare));
}

double aures_frequency_weight(double f) {
  const double u = f / 700.0 + 700.0 / f;
  return 1.0 / std::sqrt(1.0 + 0.2 * u * u);
}

double tonality_raw(const spectral::Spectrum& spectrum, const TonalityConfig& config) {
  const auto& mags = spectrum.mags;
  const std::size_t n = mags.size();
  if (n < 8) return 0.0;
  const double bin_hz = spectrum.bin_width();

  std::vector<double> level(n);
  double total_ms = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double ms = 0.5 * mags[i] * mags[i];
    total_ms += ms;
    level[i] = level_of_mean_square(ms, config.full_scale_db);
  }
  if (total_ms <= kTinyMeanSquare) return 0.0;

  static constexpr int kPrintedSet[4] = {-1, -2, +1, +3};
  static constexpr int kSymmetricSet[4] = {-3, -2, +2, +3};
  const int* neighbor_set =
      config.neighbors == NeighborSet::AsPrinted ? kPrintedSet : kSymmetricSet;

  // Step 1+2: dominant lines that exceed the neighbor set by >= 7 dB.
  std::vector<TonalComponent> components;
  std::vector<bool> consumed(n, false);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(level[i - 1] < level[i] && level[i] >= level[i + 1])) continue;
    bool tonal = true;
    for (int d = 0; d < 4; ++d) {
      const long j = static_cast<long>(i) + neighbor_set[d];
      if (j < 0 || j >= static_cast<long>(n)) continue;
      if (level[i] - level[static_cast<std::size_t>(j)] < config.prominence_db) {
        tonal = false;
        break;
      }
    }
    if (!tonal) continue;
    const double ms = 0.5 * mags[i] * mags[i];
    components.push_back({spectrum.freqs[i], ms, level[i],
                          spectral::bark_of_hz(spectrum.freqs[i] + 0.5 * bin_hz) -
                              spectral::bark_of_hz(std::max(spectrum.freqs[i] - 0.5 * bin_hz, 1.0))});
    for (long j = static_cast<long>(i) - 3; j <= static_cast<long>(i) + 3; ++j)
      if (j >= 0 && j < static_cast<long>(n)) consumed[static_cast<std::size_t>(j)] = true;
  }

  // Step 3: narrowband components, per critical band: contiguous runs of
  // not-yet-consumed bins at least 7 dB above the band median, narrower than
  // the local critical bandwidth.
  for (int b = 0; b < 24; ++b) {
    const double lo = spectral::kBarkEdgesHz[static_cast<std::size_t>(b)];
    const double hi = spectral::kBarkEdgesHz[static_cast<std::size_t>(b) + 1];
    std::vector<std::size_t> band_bins;
    for (std::size_t i = 0; i < n; ++i)
      if (spectrum.freqs[i] >= lo && spectrum.freqs[i] < hi) band_bins.push_back(i);
    if (band_bins.size() < 8) continue;

    std::vector<double> band_levels;
    for (std::size_t i : band_bins)
      if (!consumed[i]) band_levels.push_back(level[i]);
    if (band_levels.size() < 4) continue;
    std::nth_element(band_levels.begin(), band_levels.begin() + band_levels.size() / 2,
                     band_levels.end());
    const double median = band_levels[band_levels.size() / 2];

    std::size_t run_start = 0;
    bool in_run = false;
    for (std::size_t idx = 0; idx <= band_bins.size(); ++idx) {
      const bool above = idx < band_bins.size() && !consumed[band_bins[idx]] &&
                         level[band_bins[idx]] >= median + config.prominence_db;
      if (above && !in_run) {
        run_start = idx;
        in_run = true;
      } else if (!above && in_run) {
        in_run = false;
        const std::size_t first = band_bins[run_start];
        const std::size_t last = band_bins[idx - 1];
        const double width_hz = (static_cast<double>(last - first) + 1.0) * bin_hz;
        const double center = 0.5 * (spectrum.freqs[first] + spectrum.freqs[last]);
        if (width_hz >= spectral::critical_bandwidth_hz(center)) continue;
        double ms = 0.0, centroid_num = 0.0;
        for (std::size_t i = first; i <= last; ++i) {
          const double m = 0.5 * mags[i] * mags[i];
          ms += m;
          centroid_num += m * spectrum.freqs[i];
          consumed[i] = true;
        }
        if (ms <= kTinyMeanSquare) continue;
        components.push_back({centroid_num / ms, ms, level_of_mean_square(ms, config.full_scale_db),
                              spectral::bark_of_hz(spectrum.freqs[last] + 0.5 * bin_hz) -
                                  spectral::bark_of_hz(std::max(spectrum.freqs[first] - 0.5 * bin_hz, 1.0))});
      }
    }
  }

  if (components.empty()) return 0.0;

  double tonal_ms = 0.0;
  for (const auto& c : components) tonal_ms += c.mean_square;

  double weight_sq_sum = 0.0;
  for (const auto& c : components) {
    // Non-tonal energy within the critical band around the component.
    const double cb = spectral::critical_bandwidth_hz(c.freq);
    double noise_ms = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (consumed[i]) continue;
      if (std::abs(spectrum.freqs[i] - c.freq) <= 0.5 * cb) noise_ms += 0.5 * mags[i] * mags[i];
    }
    const double delta_l = c.level_db - level_of_mean_square(noise_ms, config.full_scale_db);
    const double w1 = 0.13 / (c.bark_width + 0.13);
    const double w2 = std::max(0.0, 1.0 - std::exp(-delta_l / 15.0));
    const double w3 = aures_frequency_weight(c.freq);
    const double w = w1 * w2 * w3;
    weight_sq_sum += w * w;
  }

  const double tonal_fraction = tonal_ms / total_ms;
  return std::pow(tonal_fraction, 0.79) * std::pow(std::sqrt(weight_sq_sum), 0.29);
}

double tonality_calibration(const TonalityConfig& config) {
  // 1 kHz sine at 60 dB; 1 s at 48 kHz keeps the tone bin-aligned.
  const Signal ref = audio::synth_tone(1000.0, 1.0, 48000, audio::amplitude_for_db_spl(60.0));
  TonalityConfig cal = config;
  cal.full_scale_db = spectral::kFullScaleDb;
  const double raw = tonality_raw(spectral::magnitude_spectrum(ref), cal);
  return 1.0 / raw;
}

}  // namespace

double tonality(const spectral::Spectrum& spectrum, const TonalityConfig& config) {
  static const double printed_scale = tonality_calibration({NeighborSet::AsPrinted});
  static const double symmetric_scale = tonality_calibration({NeighborSet::Symmetric});
  const double scale =
      config.neighbors == NeighborSet::AsPrinted ? printed_scale : symmetric_scale;
  return scale * tonality_raw(spectrum, config);
}

// ---------------------------------------------------------------------------
// Feature table CSV.

const char* const kFeatureCsvHeader = "stimulus,N,S,R_S,R_B,F,K,C,RT30,RT20,EDT,E,D";

std::string feature_table_to_csv(const FeatureTable& table) {
  std::string out = kFeatureCsvHeader;
  out += '\n';
  for (const auto& r : table.rows) {
    out += r.stimulus;
    for (double v : {r.loudness_db, r.sharpness_acum, r.roughness_sottek, r.roughness_hb,
                     r.fluctuation, r.tonality_tu, r.centroid_hz, r.rt30_s, r.rt20_s, r.edt_s,
                     r.echo_density, r.correlation_dim}) {
      out += ',';
      out += util::format_double(v);
    }
    out += '\n';
  }
  return out;
}

FeatureTable feature_table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty feature CSV");
  if (line != kFeatureCsvHeader)
    throw std::invalid_argument("unexpected feature CSV header: " + line);
  FeatureTable table;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 13)
      throw std::invalid_argument("feature CSV row must have 13 columns: " + line);
    FeatureVector v;
    v.stimulus = fields[0];
    double* slots[12] = {&v.loudness_db, &v.sharpness_acum, &v.roughness_sottek, &v.roughness_hb,
                         &v.fluctuation, &v.tonality_tu,    &v.centroid_hz,      &v.rt30_s,
                         &v.rt20_s,      &v.edt_s,          &v.echo_density,     &v.correlation_dim};
    for (int i = 0; i < 12; ++i) *slots[i] = util::parse_double(fields[static_cast<std::size_t>(i) + 1]);
    table.rows.push_back(std::move(v));
  }
  return table;
}

}  // namespace roomac::psycho
