#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "dlab/compensated.hpp"
#include "dlab/errors.hpp"
#include "dlab/linalg.hpp"

namespace dlab {

struct LyapunovResult {
  std::array<double, 3> exponents{};  // nats per iteration, descending
  long n_iterations = 0;
  long n_transient = 0;
  double stderr_max = 0.0;  // standard error of the leading exponent
  bool converged = false;
};

struct LyapunovOptions {
  double diverge_at = 1e3;
  int blocks = 20;          // block count for the standard-error estimate
  double stderr_tol = 1e-2; // `converged` threshold on stderr_max
};

// Tangent-vector propagation with orthonormalization at every step; the
// per-step log norms accumulate into the exponents. Standard errors come
// from block averaging of the per-step log rates.
template <PhaseMap M>
LyapunovResult lyapunov_spectrum(const M& map, Vec3 s0, long transient, long n,
                                 LyapunovOptions opts = {}) {
  if (n < opts.blocks) throw OutOfRangeError("lyapunov_spectrum: n must be at least the block count");
  if (!all_finite(s0) || max_abs(s0) > opts.diverge_at)
    throw OrbitDivergedError(0, "lyapunov_spectrum: initial state outside the divergence bound");

  Vec3 s = s0;
  for (long step = 1; step <= transient; ++step) {
    s = map.apply(s);
    if (!all_finite(s) || max_abs(s) > opts.diverge_at)
      throw OrbitDivergedError(step, "lyapunov_spectrum: orbit diverged during the transient at step " +
                                         std::to_string(step));
  }

  Mat3 frame = Mat3::identity();
  std::array<NeumaierSum, 3> total;
  const int nb = opts.blocks;
  std::vector<std::array<double, 3>> block_sum(static_cast<size_t>(nb));
  std::vector<long> block_len(static_cast<size_t>(nb), 0);

  for (long i = 0; i < n; ++i) {
    frame = map.differential(s) * frame;
    s = map.apply(s);
    if (!all_finite(s) || max_abs(s) > opts.diverge_at)
      throw OrbitDivergedError(transient + i + 1,
                               "lyapunov_spectrum: orbit diverged at step " +
                                   std::to_string(transient + i + 1));
    const QR3 qr = qr_mgs(frame);
    frame = qr.q;
    const size_t blk = static_cast<size_t>((i * nb) / n);
    ++block_len[blk];
    for (int c = 0; c < 3; ++c) {
      const double lr = std::log(qr.r(c, c));
      total[static_cast<size_t>(c)].add(lr);
      block_sum[blk][static_cast<size_t>(c)] += lr;
    }
  }

  // order the channels by their exponent
  std::array<int, 3> order = {0, 1, 2};
  std::array<double, 3> lambda;
  for (int c = 0; c < 3; ++c) lambda[static_cast<size_t>(c)] = total[static_cast<size_t>(c)].value() / static_cast<double>(n);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return lambda[static_cast<size_t>(a)] > lambda[static_cast<size_t>(b)]; });

  LyapunovResult res;
  res.n_iterations = n;
  res.n_transient = transient;
  for (int c = 0; c < 3; ++c) res.exponents[static_cast<size_t>(c)] = lambda[static_cast<size_t>(order[static_cast<size_t>(c)])];

  const int lead = order[0];
  double mean = 0.0;
  for (int bi = 0; bi < nb; ++bi)
    mean += block_sum[static_cast<size_t>(bi)][static_cast<size_t>(lead)] / static_cast<double>(block_len[static_cast<size_t>(bi)]);
  mean /= nb;
  double var = 0.0;
  for (int bi = 0; bi < nb; ++bi) {
    const double d = block_sum[static_cast<size_t>(bi)][static_cast<size_t>(lead)] / static_cast<double>(block_len[static_cast<size_t>(bi)]) - mean;
    var += d * d;
  }
  var /= (nb - 1);
  res.stderr_max = std::sqrt(var / nb);
  res.converged = res.stderr_max <= opts.stderr_tol;
  return res;
}

enum class AttractorKind { diverged, fixed_point_like, curve_or_periodic, chaotic };

inline const char* to_string(AttractorKind k) {
  switch (k) {
    case AttractorKind::diverged: return "diverged";
    case AttractorKind::fixed_point_like: return "fixed_point_like";
    case AttractorKind::curve_or_periodic: return "curve_or_periodic";
    case AttractorKind::chaotic: return "chaotic";
  }
  return "unknown";
}

struct OrbitClass {
  AttractorKind kind = AttractorKind::diverged;
  long escape_step = -1;            // set when kind == diverged
  double leading = 0.0;             // leading exponent, when computed
  double stderr_max = 0.0;
  bool converged = false;
};

struct ClassifyOptions {
  long transient = 10000;
  long n = 1000000;
  LyapunovOptions lyap{};
};

// Threshold eps = max(0.005, 3*stderr) separates the near-zero exponent of an
// invariant curve from genuine chaos at these orbit lengths.
template <PhaseMap M>
OrbitClass classify_attractor(const M& map, Vec3 s0, const ClassifyOptions& opts = {}) {
  OrbitClass out;
  try {
    const LyapunovResult lr = lyapunov_spectrum(map, s0, opts.transient, opts.n, opts.lyap);
    out.leading = lr.exponents[0];
    out.stderr_max = lr.stderr_max;
    out.converged = lr.converged;
    const double eps = std::max(0.005, 3.0 * lr.stderr_max);
    if (lr.exponents[0] > eps)
      out.kind = AttractorKind::chaotic;
    else if (lr.exponents[0] < -eps)
      out.kind = AttractorKind::fixed_point_like;
    else
      out.kind = AttractorKind::curve_or_periodic;
  } catch (const OrbitDivergedError& e) {
    out.kind = AttractorKind::diverged;
    out.escape_step = e.step;
  }
  return out;
}

}  // namespace dlab
