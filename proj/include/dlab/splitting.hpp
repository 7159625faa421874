#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/linalg.hpp"
#include "dlab/spectral.hpp"

namespace dlab {

// Finite-time dominated-splitting and volume-expansion indicators, built from
// the singular values of the differential cocycle over disjoint windows.
struct PseudoHypReport {
  long window_length = 0;
  long n_windows = 0;
  double sigma_est = 0.0;      // sup over windows of the smallest per-step rate
  double nu_est = 0.0;         // inf over windows of the two-largest volume rate
  double min_split_gap = 0.0;  // min over windows of log r2 - log r3
  double fraction_pass = 0.0;  // windows with smallest rate < 1 and volume rate > 1
};

namespace detail {

// Product of cocycle factors kept as Q * R * 2^exp2 with periodic QR
// refactorization; 3x3 products over a hundred steps overflow doubles
// otherwise. Rescaling uses powers of two so it is exact.
struct CocycleAccumulator {
  Mat3 q = Mat3::identity();
  Mat3 r = Mat3::identity();
  Mat3 chunk = Mat3::identity();
  int chunk_len = 0;
  long exp2 = 0;
  double log_abs_det = 0.0;
  static constexpr int refactor_every = 20;

  void push(const Mat3& j) {
    chunk = j * chunk;
    if (++chunk_len == refactor_every) flush();
  }

  void flush() {
    if (chunk_len == 0) return;
    const QR3 f = qr_mgs(chunk * q);
    q = f.q;
    r = f.r * r;
    log_abs_det += std::log(f.r(0, 0)) + std::log(f.r(1, 1)) + std::log(f.r(2, 2));
    const double m = max_abs_entry(r);
    if (m > 0.0) {
      int e = 0;
      std::frexp(m, &e);
      exp2 += e;
      const double inv = std::ldexp(1.0, -e);
      for (int i = 0; i < 3; ++i)
        for (int jj = 0; jj < 3; ++jj) r(i, jj) *= inv;
    }
    chunk = Mat3::identity();
    chunk_len = 0;
  }

  // Log singular values of the accumulated product, descending. The smallest
  // one drowns in roundoff once s3/s1 < eps; there it is recovered from the
  // exact determinant, |det| = s1 s2 s3.
  std::array<double, 3> log_singular_values() {
    flush();
    const std::array<double, 3> sv = singular_values(r);
    const double ln2 = std::log(2.0);
    const double ls1 = std::log(sv[0]) + static_cast<double>(exp2) * ln2;
    const double ls2 = std::log(sv[1]) + static_cast<double>(exp2) * ln2;
    double ls3;
    if (sv[2] > 1e-13 * sv[0])
      ls3 = std::log(sv[2]) + static_cast<double>(exp2) * ln2;
    else
      ls3 = log_abs_det - ls1 - ls2;
    return {ls1, ls2, ls3};
  }
};

}  // namespace detail

// Per-window log rates {ln r1, ln r2, ln r3} (descending) of the three
// singular values of the window cocycle, normalized per iteration. Windows
// are disjoint so they give independent samples for the pass statistic.
template <PhaseMap M>
std::vector<std::array<double, 3>> window_log_rates(const M& map, Vec3 s0, long transient, long n,
                                                    long window, double diverge_at = 1e3) {
  if (window < 10) throw OutOfRangeError("finite_time_splitting requires window >= 10");
  if (n < 20 * window) throw OutOfRangeError("finite_time_splitting requires n >= 20 * window");
  if (!all_finite(s0) || max_abs(s0) > diverge_at)
    throw OrbitDivergedError(0, "finite_time_splitting: initial state outside the divergence bound");

  Vec3 s = s0;
  for (long step = 1; step <= transient; ++step) {
    s = map.apply(s);
    if (!all_finite(s) || max_abs(s) > diverge_at)
      throw OrbitDivergedError(step, "finite_time_splitting: orbit diverged during the transient");
  }

  const long n_windows = n / window;
  std::vector<std::array<double, 3>> rates;
  rates.reserve(static_cast<size_t>(n_windows));
  for (long w = 0; w < n_windows; ++w) {
    detail::CocycleAccumulator acc;
    for (long i = 0; i < window; ++i) {
      acc.push(map.differential(s));
      s = map.apply(s);
      if (!all_finite(s) || max_abs(s) > diverge_at)
        throw OrbitDivergedError(transient + w * window + i + 1,
                                 "finite_time_splitting: orbit diverged at step " +
                                     std::to_string(transient + w * window + i + 1));
    }
    const std::array<double, 3> lsv = acc.log_singular_values();
    rates.push_back({lsv[0] / static_cast<double>(window), lsv[1] / static_cast<double>(window),
                     lsv[2] / static_cast<double>(window)});
  }
  return rates;
}

// The report states indicators only; whether they certify pseudohyperbolicity
// is not judged here.
template <PhaseMap M>
PseudoHypReport finite_time_splitting(const M& map, Vec3 s0, long transient, long n, long window,
                                      double diverge_at = 1e3) {
  const std::vector<std::array<double, 3>> rates =
      window_log_rates(map, s0, transient, n, window, diverge_at);
  PseudoHypReport rep;
  rep.window_length = window;
  rep.n_windows = static_cast<long>(rates.size());
  double max_r3 = -std::numeric_limits<double>::infinity();
  double min_vol = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  long pass = 0;
  for (const auto& lr : rates) {
    max_r3 = std::max(max_r3, lr[2]);
    const double vol = lr[0] + lr[1];
    min_vol = std::min(min_vol, vol);
    min_gap = std::min(min_gap, lr[1] - lr[2]);
    if (lr[2] < 0.0 && vol > 0.0) ++pass;
  }
  rep.sigma_est = std::exp(max_r3);
  rep.nu_est = std::exp(min_vol);
  rep.min_split_gap = min_gap;
  rep.fraction_pass = static_cast<double>(pass) / static_cast<double>(rates.size());
  return rep;
}

}  // namespace dlab
