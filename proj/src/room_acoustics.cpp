#include "roomac/room_acoustics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "util.hpp"

namespace roomac::room {

namespace {

constexpr double kLevelFloorDb = -150.0;

// Index after which the IR is dominated by measurement noise: first point
// where the 50 ms moving RMS falls within 3 dB of the RMS of the final 10%.
std::size_t noise_truncation_point(const std::vector<double>& x, int sample_rate) {
  const std::size_t n = x.size();
  const std::size_t tail_start = n - std::max<std::size_t>(n / 10, 1);
  double tail_energy = 0.0;
  for (std::size_t i = tail_start; i < n; ++i) tail_energy += x[i] * x[i];
  const double tail_ms = tail_energy / static_cast<double>(n - tail_start);

  const std::size_t win = std::max<std::size_t>(static_cast<std::size_t>(0.05 * sample_rate), 1);
  if (n <= win || tail_ms <= 0.0) return n;
  const double threshold = tail_ms * std::pow(10.0, 3.0 / 10.0);  // within 3 dB

  double acc = 0.0;
  for (std::size_t i = 0; i < win; ++i) acc += x[i] * x[i];
  std::size_t peak_idx = 0;
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(x[i]) > peak) {
      peak = std::abs(x[i]);
      peak_idx = i;
    }
  for (std::size_t i = 0; i + win < n; ++i) {
    if (i > peak_idx && acc / static_cast<double>(win) <= threshold) return i + win;
    acc += x[i + win] * x[i + win] - x[i] * x[i];
  }
  return n;
}

}  // namespace

DecayCurve schroeder_decay(const Signal& mono_ir) {
  mono_ir.validate();
  const std::vector<double>& x = mono_ir.mono();
  double total = 0.0;
  for (double v : x) total += v * v;
  if (total <= 0.0) throw std::invalid_argument("silent input");

  const std::size_t cut = noise_truncation_point(x, mono_ir.sample_rate);

  DecayCurve curve;
  curve.times.resize(cut);
  curve.level_db.resize(cut);
  double remaining = 0.0;
  for (std::size_t i = 0; i < cut; ++i) remaining += x[i] * x[i];
  const double norm = remaining;
  for (std::size_t i = 0; i < cut; ++i) {
    curve.times[i] = static_cast<double>(i) / mono_ir.sample_rate;
    curve.level_db[i] =
        remaining > 0.0 ? std::max(kLevelFloorDb, 10.0 * std::log10(remaining / norm))
                        : kLevelFloorDb;
    remaining -= x[i] * x[i];
  }
  return curve;
}

double decay_time(const DecayCurve& curve, double start_db, double end_db, double extrapolate_to) {
  if (start_db <= end_db) throw std::invalid_argument("start_db must be above end_db");
  const auto& level = curve.level_db;
  const std::size_t n = level.size();

  std::size_t i_start = n, i_end = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (i_start == n && level[i] <= start_db) i_start = i;
    if (level[i] <= end_db) {
      i_end = i;
      break;
    }
  }
  if (i_start == n || i_end == n || i_end <= i_start)
    throw std::invalid_argument("insufficient decay range");

  // Least-squares line over all samples between the two crossings.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double count = static_cast<double>(i_end - i_start + 1);
  for (std::size_t i = i_start; i <= i_end; ++i) {
    sx += curve.times[i];
    sy += level[i];
    sxx += curve.times[i] * curve.times[i];
    sxy += curve.times[i] * level[i];
  }
  const double denom = count * sxx - sx * sx;
  if (denom <= 0.0) throw std::invalid_argument("insufficient decay range");
  const double slope = (count * sxy - sx * sy) / denom;  // dB per second
  if (!(slope < 0.0)) throw std::invalid_argument("non-decreasing decay curve");
  return std::abs(extrapolate_to) / std::abs(slope);
}

IrDecayTimes ir_decay_times(const ImpulseResponse& ir) {
  ir.signal.validate();
  double rt30_sum = 0, rt20_sum = 0, edt_sum = 0;
  for (const auto& ch : ir.signal.channels) {
    const auto curve = schroeder_decay(make_mono(ch, ir.signal.sample_rate));
    rt30_sum += rt30(curve);
    rt20_sum += rt20(curve);
    edt_sum += edt(curve);
  }
  const double k = static_cast<double>(ir.signal.channel_count());
  return {rt30_sum / k, rt20_sum / k, edt_sum / k};
}

std::string decay_to_csv(const DecayCurve& curve) {
  std::string out = "time,level_db\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i) {
    out += util::format_double(curve.times[i]);
    out += ',';
    out += util::format_double(curve.level_db[i]);
    out += '\n';
  }
  return out;
}

}  // namespace roomac::room
