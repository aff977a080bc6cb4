#pragma once

#include <string>
#include <vector>

#include "roomac/signal.hpp"

namespace roomac::room {

// Backward-integrated energy decay: level_db[0] = 0, non-increasing.
struct DecayCurve {
  std::vector<double> times;     // seconds, ascending from 0
  std::vector<double> level_db;  // dB relative to total energy
};

// Schroeder backward integration of a mono IR. The IR is first truncated
// where a 50 ms moving RMS falls within 3 dB of the tail-estimated noise
// floor, then L(t) = 10 log10(sum_{i>=t} s_i^2 / sum s_i^2).
DecayCurve schroeder_decay(const Signal& mono_ir);

// Least-squares line through the curve between the first crossings of
// start_db and end_db; returns |extrapolate_to| / |slope| in seconds.
// Throws "insufficient decay range" when the curve never reaches end_db.
double decay_time(const DecayCurve& curve, double start_db, double end_db,
                  double extrapolate_to = -60.0);

inline double rt20(const DecayCurve& c) { return decay_time(c, -5.0, -25.0); }
inline double rt30(const DecayCurve& c) { return decay_time(c, -5.0, -35.0); }
inline double edt(const DecayCurve& c) { return decay_time(c, -0.1, -10.1); }

struct IrDecayTimes {
  double rt30;
  double rt20;
  double edt;
};

// Per-channel decay times averaged across channels (one value per stimulus).
IrDecayTimes ir_decay_times(const ImpulseResponse& ir);

// Two-column CSV (time,level_db) for plotting.
std::string decay_to_csv(const DecayCurve& curve);

}  // namespace roomac::room
