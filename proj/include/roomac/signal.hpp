#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace roomac {

// Uniformly sampled audio, 1 or 2 channels, linear amplitude with digital
// full scale at +-1.0. All processing is double precision; file I/O converts
// at the boundary.
struct Signal {
  std::vector<std::vector<double>> channels;
  int sample_rate = 0;

  Signal() = default;
  Signal(std::vector<std::vector<double>> ch, int rate)
      : channels(std::move(ch)), sample_rate(rate) {}

  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }
  int channel_count() const { return static_cast<int>(channels.size()); }
  double duration() const {
    return sample_rate > 0 ? static_cast<double>(length()) / sample_rate : 0.0;
  }
  bool is_mono() const { return channels.size() == 1; }

  // Throws std::invalid_argument on any structural violation: channel count
  // not in {1,2}, unequal or zero channel lengths, non-positive rate, or
  // non-finite samples.
  void validate() const;

  // Sample-wise channel mean; identity for mono input.
  Signal to_mono() const;

  const std::vector<double>& mono() const;  // throws unless exactly 1 channel
};

Signal make_mono(std::vector<double> samples, int sample_rate);
Signal make_stereo(std::vector<double> left, std::vector<double> right, int sample_rate);

struct ImpulseResponse {
  Signal signal;     // 1 or 2 channels; 2 = binaural
  std::string label;
};

}  // namespace roomac
