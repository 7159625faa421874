#pragma once

#include <array>
#include <complex>
#include <utility>
#include <vector>

#include "dlab/linalg.hpp"
#include "dlab/lyapunov.hpp"
#include "dlab/orbit.hpp"
#include "dlab/spectral.hpp"

namespace dlab {

// Parameters of the three-dimensional Henon map
//   (x, y, z) -> (y, z, m1 + m2*y + b*x - z^2),
// where b is the (constant) Jacobian of the map.
struct HenonParams {
  double m1 = 0.0;
  double m2 = 0.0;
  double b = 0.0;
};

using HenonState = Vec3;

inline HenonState henon_step(const HenonParams& p, const HenonState& s) {
  return {s.y, s.z, p.m1 + p.m2 * s.y + p.b * s.x - s.z * s.z};
}

inline Mat3 henon_jacobian(const HenonParams& p, const HenonState& s) {
  Mat3 j;
  j(0, 1) = 1.0;
  j(1, 2) = 1.0;
  j(2, 0) = p.b;
  j(2, 1) = p.m2;
  j(2, 2) = -2.0 * s.z;
  return j;
}

struct HenonFixedPoint {
  HenonState state;
  std::array<std::complex<double>, 3> multipliers;
  int multiplicity = 1;
};

// Fixed points solve z^2 + (1 - m2 - b) z - m1 = 0 with x = y = z. The
// multipliers at a fixed point are the roots of mu^3 + 2z mu^2 - m2 mu - b.
// A double root of the quadratic is reported once with multiplicity 2.
inline std::vector<HenonFixedPoint> henon_fixed_points(const HenonParams& p) {
  const double qb = 1.0 - p.m2 - p.b;
  const double qc = -p.m1;
  const double disc = qb * qb - 4.0 * qc;

  std::vector<double> zs;
  std::vector<int> mult;
  if (disc < 0.0) {
    return {};
  } else if (disc == 0.0) {
    zs.push_back(-qb / 2.0);
    mult.push_back(2);
  } else {
    const double sq = std::sqrt(disc);
    if (qb == 0.0) {
      zs = {-sq / 2.0, sq / 2.0};
    } else {
      // stable form: avoid cancellation in the smaller root
      const double q = -(qb + std::copysign(sq, qb)) / 2.0;
      zs = {q, qc / q};
    }
    mult = {1, 1};
    if (zs[0] > zs[1]) std::swap(zs[0], zs[1]);
  }

  std::vector<HenonFixedPoint> out;
  for (size_t i = 0; i < zs.size(); ++i) {
    const double z = zs[i];
    out.push_back({HenonState{z, z, z}, cubic_roots(2.0 * z, -p.m2, -p.b), mult[i]});
  }
  return out;
}

// The parameter point where the map has a fixed point with multipliers
// (-1, -1, +1). Matching mu^3 + 2z mu^2 - m2 mu - b against
// (mu + 1)^2 (mu - 1) = mu^3 + mu^2 - mu - 1 forces 2z = 1, m2 = 1, b = 1,
// and the fixed-point equation then gives m1 = z^2 + (1 - m2 - b) z.
inline std::pair<HenonParams, HenonState> find_resonant_degeneracy() {
  const double z = 0.5;
  const double m2 = 1.0;
  const double b = 1.0;
  const double m1 = z * z + (1.0 - m2 - b) * z;
  return {HenonParams{m1, m2, b}, HenonState{z, z, z}};
}

// One application of the limit map
//   (X1, X2, Y) -> (Y, X1, M1 + M2*X1 + B*X2 - Y^2),
// stored in Vec3 as (x, y, z) = (X1, X2, Y).
inline HenonState limit_map_step(const HenonParams& p, const HenonState& s) {
  return {s.z, s.x, p.m1 + p.m2 * s.x + p.b * s.y - s.z * s.z};
}

inline Mat3 limit_map_jacobian(const HenonParams& p, const HenonState& s) {
  Mat3 j;
  j(0, 2) = 1.0;
  j(1, 0) = 1.0;
  j(2, 0) = p.m2;
  j(2, 1) = p.b;
  j(2, 2) = -2.0 * s.z;
  return j;
}

// Coordinate identification between the limit map and the Henon form:
// (x, y, z) = (X2, X1, Y) conjugates the two maps exactly.
inline HenonState limit_to_henon_coords(const HenonState& limit_state) {
  return {limit_state.y, limit_state.x, limit_state.z};
}
inline HenonState henon_to_limit_coords(const HenonState& henon_state) {
  return {henon_state.y, henon_state.x, henon_state.z};
}

struct HenonSystem {
  HenonParams p;
  Vec3 apply(const Vec3& s) const { return henon_step(p, s); }
  Mat3 differential(const Vec3& s) const { return henon_jacobian(p, s); }
};

struct LimitMapSystem {
  HenonParams p;
  Vec3 apply(const Vec3& s) const { return limit_map_step(p, s); }
  Mat3 differential(const Vec3& s) const { return limit_map_jacobian(p, s); }
};

inline OrbitResult iterate_orbit(const HenonParams& p, Vec3 s0, long transient, long n,
                                 double diverge_at) {
  return iterate_orbit(HenonSystem{p}, s0, transient, n, diverge_at);
}

inline LyapunovResult lyapunov_spectrum(const HenonParams& p, Vec3 s0, long transient, long n,
                                        LyapunovOptions opts = {}) {
  return lyapunov_spectrum(HenonSystem{p}, s0, transient, n, opts);
}

inline OrbitClass classify_attractor(const HenonParams& p, Vec3 s0,
                                     const ClassifyOptions& opts = {}) {
  return classify_attractor(HenonSystem{p}, s0, opts);
}

}  // namespace dlab
