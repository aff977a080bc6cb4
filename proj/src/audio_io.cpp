#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "fft.hpp"
#include "roomac/audio_io.hpp"
#include "util.hpp"

namespace roomac::audio {

Signal convolve(const Signal& dry, const ImpulseResponse& ir) {
  dry.validate();
  ir.signal.validate();
  if (!dry.is_mono()) throw std::invalid_argument("convolve expects a mono dry signal");
  if (dry.sample_rate != ir.signal.sample_rate)
    throw std::invalid_argument("sample-rate mismatch: dry " + std::to_string(dry.sample_rate) +
                                " Hz vs IR " + std::to_string(ir.signal.sample_rate) + " Hz");

  const std::vector<double>& x = dry.mono();
  const std::size_t n = x.size();
  const std::size_t m = ir.signal.length();
  const std::size_t out_len = n + m - 1;
  const std::size_t nfft = fft::next_pow2(out_len);

  std::vector<double> padded_dry(nfft, 0.0);
  std::copy(x.begin(), x.end(), padded_dry.begin());
  const auto dry_spec = fft::real_forward(padded_dry);

  Signal out;
  out.sample_rate = dry.sample_rate;
  for (const auto& ir_ch : ir.signal.channels) {
    std::vector<double> padded_ir(nfft, 0.0);
    std::copy(ir_ch.begin(), ir_ch.end(), padded_ir.begin());
    auto spec = fft::real_forward(padded_ir);
    for (std::size_t k = 0; k < spec.size(); ++k) spec[k] *= dry_spec[k];
    auto full = fft::real_inverse(spec, nfft);
    full.resize(out_len);
    out.channels.push_back(std::move(full));
  }
  return out;
}

ImpulseResponse synth_exponential_ir(double t60, double duration, int sample_rate,
                                     std::uint64_t seed, int channels, std::string label) {
  if (t60 <= 0) throw std::invalid_argument("t60 must be positive");
  if (duration <= 0) throw std::invalid_argument("duration must be positive");
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
  if (channels < 1 || channels > 2) throw std::invalid_argument("unsupported channel count");

  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  // Amplitude envelope exp(-3 ln10 t/t60): the squared (energy) envelope then
  // decays 60 dB per t60, which is what the Schroeder level tracks.
  const double decay = 3.0 * std::numbers::ln10 / t60;

  ImpulseResponse ir;
  ir.label = std::move(label);
  ir.signal.sample_rate = sample_rate;
  for (int c = 0; c < channels; ++c) {
    std::mt19937_64 rng(util::derive_seed(seed, static_cast<std::uint64_t>(c)));
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<double> ch(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      ch[i] = gauss(rng) * std::exp(-decay * t);
    }
    ir.signal.channels.push_back(std::move(ch));
  }
  return ir;
}

Signal synth_tone(double freq_hz, double duration, int sample_rate, double amplitude,
                  double phase) {
  if (duration <= 0 || sample_rate <= 0) throw std::invalid_argument("invalid tone parameters");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  std::vector<double> out(n);
  const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
  for (std::size_t i = 0; i < n; ++i) out[i] = amplitude * std::sin(w * i + phase);
  return make_mono(std::move(out), sample_rate);
}

Signal synth_am_tone(double carrier_hz, double mod_hz, double mod_depth, double duration,
                     int sample_rate, double amplitude) {
  if (duration <= 0 || sample_rate <= 0) throw std::invalid_argument("invalid tone parameters");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  std::vector<double> out(n);
  const double wc = 2.0 * std::numbers::pi * carrier_hz / sample_rate;
  const double wm = 2.0 * std::numbers::pi * mod_hz / sample_rate;
  for (std::size_t i = 0; i < n; ++i)
    out[i] = amplitude * (1.0 + mod_depth * std::cos(wm * i)) * std::sin(wc * i);
  return make_mono(std::move(out), sample_rate);
}

Signal synth_white_noise(double duration, int sample_rate, std::uint64_t seed, double amplitude) {
  if (duration <= 0 || sample_rate <= 0) throw std::invalid_argument("invalid noise parameters");
  const std::size_t n = static_cast<std::size_t>(std::llround(duration * sample_rate));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = amplitude * gauss(rng);
  return make_mono(std::move(out), sample_rate);
}

double amplitude_for_db_spl(double db_spl, double full_scale_db) {
  // RMS relative to full scale, times sqrt(2) for the sine peak.
  return std::numbers::sqrt2 * std::pow(10.0, (db_spl - full_scale_db) / 20.0);
}

}  // namespace roomac::audio
