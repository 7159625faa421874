#pragma once

#include <vector>

#include "dlab/linalg.hpp"

namespace dlab {

struct OrbitResult {
  std::vector<Vec3> states;  // the recorded post-transient states
  long diverged_at = -1;     // total step count at divergence, -1 if bounded
  bool diverged() const { return diverged_at >= 0; }
};

// Applies the map `transient` times (discarded), then records `n` states.
// Aborts the first time any component exceeds `diverge_at` in magnitude or
// stops being finite; the step count includes the transient.
template <PhaseMap M>
OrbitResult iterate_orbit(const M& map, Vec3 s0, long transient, long n, double diverge_at) {
  OrbitResult out;
  if (!all_finite(s0) || max_abs(s0) > diverge_at) {
    out.diverged_at = 0;
    return out;
  }
  out.states.reserve(static_cast<size_t>(n));
  Vec3 s = s0;
  for (long step = 1; step <= transient + n; ++step) {
    s = map.apply(s);
    if (!all_finite(s) || max_abs(s) > diverge_at) {
      out.diverged_at = step;
      return out;
    }
    if (step > transient) out.states.push_back(s);
  }
  return out;
}

}  // namespace dlab
