#pragma once

#include <cstdint>
#include <string>

#include "roomac/signal.hpp"

namespace roomac::audio {

// Reads a RIFF WAV file (PCM 16/24/32 bit or 32-bit float, 1-2 channels).
// Integer samples are scaled by 1/2^(bits-1), so 16-bit 32767 -> 32767/32768.
Signal read_wav(const std::string& path);

// Writes 32-bit float WAV. read_wav(write_wav(s)) is bit-exact whenever the
// samples of s are representable in single precision.
void write_wav(const Signal& signal, const std::string& path);

// Full linear convolution of a mono dry signal with each IR channel, computed
// with zero-padded power-of-two transforms. Output length is
// len(dry) + len(ir) - 1 and matches direct time-domain convolution to within
// 1e-9 relative error.
Signal convolve(const Signal& dry, const ImpulseResponse& ir);

// Gaussian white noise shaped so the Schroeder decay level falls exactly
// 60 dB per t60 seconds (amplitude envelope exp(-3 ln10 t / t60)).
// Deterministic for a fixed seed.
ImpulseResponse synth_exponential_ir(double t60, double duration, int sample_rate,
                                     std::uint64_t seed, int channels = 1,
                                     std::string label = "synthetic");

Signal synth_tone(double freq_hz, double duration, int sample_rate, double amplitude = 1.0,
                  double phase = 0.0);

// Carrier with sinusoidal amplitude modulation:
//   a * (1 + depth*cos(2 pi f_mod t)) * sin(2 pi f_c t), peak a*(1+depth).
Signal synth_am_tone(double carrier_hz, double mod_hz, double mod_depth, double duration,
                     int sample_rate, double amplitude);

Signal synth_white_noise(double duration, int sample_rate, std::uint64_t seed,
                         double amplitude = 1.0);

// Peak amplitude of a sine whose RMS level equals db_spl under the convention
// that digital full scale maps to full_scale_db (default 94 dB SPL ~ 1 Pa).
double amplitude_for_db_spl(double db_spl, double full_scale_db = 94.0);

}  // namespace roomac::audio
