#include "roomac/signal.hpp"

#include <cmath>
#include <stdexcept>

namespace roomac {

void Signal::validate() const {
  if (channels.empty() || channels.size() > 2)
    throw std::invalid_argument("unsupported channel count: " + std::to_string(channels.size()));
  const std::size_t n = channels.front().size();
  if (n == 0) throw std::invalid_argument("zero-length audio");
  for (const auto& ch : channels) {
    if (ch.size() != n) throw std::invalid_argument("channels have unequal length");
    for (double v : ch)
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite sample value");
  }
  if (sample_rate <= 0) throw std::invalid_argument("sample rate must be positive");
}

Signal Signal::to_mono() const {
  if (channels.size() == 1) return *this;
  if (channels.size() != 2) throw std::invalid_argument("unsupported channel count");
  const std::size_t n = length();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (channels[0][i] + channels[1][i]);
  return make_mono(std::move(out), sample_rate);
}

const std::vector<double>& Signal::mono() const {
  if (channels.size() != 1) throw std::invalid_argument("expected a mono signal");
  return channels.front();
}

Signal make_mono(std::vector<double> samples, int sample_rate) {
  Signal s;
  s.channels.push_back(std::move(samples));
  s.sample_rate = sample_rate;
  return s;
}

Signal make_stereo(std::vector<double> left, std::vector<double> right, int sample_rate) {
  Signal s;
  s.channels.push_back(std::move(left));
  s.channels.push_back(std::move(right));
  s.sample_rate = sample_rate;
  return s;
}

}  // namespace roomac
