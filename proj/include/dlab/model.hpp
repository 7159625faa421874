#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "dlab/errors.hpp"
#include "dlab/linalg.hpp"

namespace dlab {

// Saddle data at the resonance: multipliers (lambda, -lambda, gamma0) with
// gamma0 = gamma_sign / lambda^2, so the saddle Jacobian is exactly one.
struct ResonantBase {
  double lambda = 0.5;
  int gamma_sign = +1;
};

// Governing parameters of the three-parameter unfolding:
//   mu1  splitting height of the invariant manifolds at the homoclinic point,
//   mu2  = 1 - |lambda1 lambda2 gamma|,
//   mu3  = lambda1 / |lambda2| - 1.
struct Unfolding {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double mu3 = 0.0;
};

struct SaddleMultipliers {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gamma = 0.0;
};

// Taylor coefficients of the global (homoclinic excursion) map around the
// outgoing homoclinic point (0, 0, ym):
//   x1 -> x1p + a11 x1 + a12 x2 + b1 (y - ym)
//   x2 -> x2p + a21 x1 + a22 x2 + b2 (y - ym)
//   y  -> mu1 + c1 x1 + c2 x2 + d (y - ym)^2
struct GlobalCoeffs {
  double x1p = 0.0, x2p = 0.0;
  double ym = 0.0;
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double b1 = 0.0, b2 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double d = 0.0;
};

struct ModelSpec {
  ResonantBase base;
  GlobalCoeffs coeffs;
};

// Local coordinates near the saddle.
struct ModelState {
  double x1 = 0.0, x2 = 0.0, y = 0.0;
  friend bool operator==(const ModelState& a, const ModelState& b) {
    return a.x1 == b.x1 && a.x2 == b.x2 && a.y == b.y;
  }
};

// Determinant of the differential of the global map at y = ym.
inline double global_jacobian_det(const GlobalCoeffs& c) {
  return c.c1 * (c.a12 * c.b2 - c.a22 * c.b1) - c.c2 * (c.a11 * c.b2 - c.a21 * c.b1);
}

inline void validate(const ResonantBase& b) {
  if (!(b.lambda > 0.0 && b.lambda < 1.0))
    throw InvariantViolationError("lambda must lie in (0, 1)");
  if (b.gamma_sign != 1 && b.gamma_sign != -1)
    throw InvariantViolationError("gamma_sign must be +1 or -1");
}

inline void validate(const GlobalCoeffs& c) {
  if (c.d == 0.0)
    throw InvariantViolationError("d == 0 violates the quadratic tangency condition");
  if (c.b1 == 0.0 && c.b2 == 0.0)
    throw InvariantViolationError("b1 == 0 and b2 == 0 violates the quadratic tangency condition");
  if (global_jacobian_det(c) == 0.0)
    throw InvariantViolationError("J1 == 0: the global map is not a local diffeomorphism");
  if (c.c1 == 0.0 && c.c2 == 0.0)
    throw InvariantViolationError("c1 == 0 and c2 == 0: the global map loses the expanding direction");
  if (c.b1 * c.c1 * c.b2 * c.c2 == 0.0)
    throw InvariantViolationError(
        "b1*c1*b2*c2 == 0 violates the simple-tangency coefficient condition");
  if (!(c.ym > 0.0)) throw InvariantViolationError("ym must be positive");
  if (c.x1p == 0.0 && c.x2p == 0.0)
    throw InvariantViolationError("x1p and x2p cannot both be zero");
}

inline void validate(const ModelSpec& spec) {
  validate(spec.base);
  validate(spec.coeffs);
}

// Embeds (mu2, mu3) into the multipliers by the symmetric square-root split
//   lambda1 = lambda * s,  lambda2 = -lambda / s,  s = sqrt(1 + mu3),
//   gamma   = gamma_sign * (1 - mu2) / lambda^2,
// which satisfies the defining relations of mu2 and mu3 exactly and keeps
// lambda1 * lambda2 = -lambda^2 independent of mu3.
inline SaddleMultipliers multipliers_from_unfolding(const ResonantBase& base, const Unfolding& u) {
  if (!(std::abs(u.mu2) < 1.0)) throw OutOfRangeError("unfolding requires |mu2| < 1");
  if (!(1.0 + u.mu3 > 0.0)) throw OutOfRangeError("unfolding requires 1 + mu3 > 0");
  const double s = std::sqrt(1.0 + u.mu3);
  SaddleMultipliers m;
  m.lambda1 = base.lambda * s;
  m.lambda2 = -base.lambda / s;
  m.gamma = static_cast<double>(base.gamma_sign) * (1.0 - u.mu2) / (base.lambda * base.lambda);
  if (!(m.lambda1 > 0.0 && m.lambda1 < 1.0))
    throw OutOfRangeError("resulting lambda1 leaves (0, 1)");
  if (!(std::abs(m.lambda2) < 1.0)) throw OutOfRangeError("resulting |lambda2| reaches 1");
  if (!(std::abs(m.gamma) > 1.0)) throw OutOfRangeError("resulting |gamma| drops to 1 or below");
  return m;
}

inline ModelState local_map(const SaddleMultipliers& m, const ModelState& s) {
  return {m.lambda1 * s.x1, m.lambda2 * s.x2, m.gamma * s.y};
}

// k-fold composition of the local map; the loop keeps the sign alternation of
// lambda2^k exact and matches repeated application bit for bit.
inline ModelState local_map_iterate(const SaddleMultipliers& m, long k, const ModelState& s) {
  if (k < 0) throw OutOfRangeError("local_map_iterate requires k >= 0");
  ModelState out = s;
  for (long i = 0; i < k; ++i) out = local_map(m, out);
  return out;
}

// Radius of invertibility in y - ym: the determinant of the differential is
// J1 + 2 d (y - ym) det[[a11,a12],[a21,a22]], linear in y - ym.
inline double eta_max(const GlobalCoeffs& c) {
  const double det_a = c.a11 * c.a22 - c.a12 * c.a21;
  if (det_a == 0.0) return std::numeric_limits<double>::infinity();
  return std::abs(global_jacobian_det(c) / (2.0 * c.d * det_a));
}

inline ModelState global_map(const GlobalCoeffs& c, double mu1, const ModelState& s) {
  const double eta = s.y - c.ym;
  if (!(std::abs(eta) < eta_max(c)))
    throw OutsideDomainError("global_map: |y - ym| = " + std::to_string(std::abs(eta)) +
                             " reaches the invertibility radius " + std::to_string(eta_max(c)));
  return {c.x1p + c.a11 * s.x1 + c.a12 * s.x2 + c.b1 * eta,
          c.x2p + c.a21 * s.x1 + c.a22 * s.x2 + c.b2 * eta,
          mu1 + c.c1 * s.x1 + c.c2 * s.x2 + c.d * eta * eta};
}

inline Mat3 global_map_differential(const GlobalCoeffs& c, const ModelState& s) {
  Mat3 j;
  j(0, 0) = c.a11;
  j(0, 1) = c.a12;
  j(0, 2) = c.b1;
  j(1, 0) = c.a21;
  j(1, 1) = c.a22;
  j(1, 2) = c.b2;
  j(2, 0) = c.c1;
  j(2, 1) = c.c2;
  j(2, 2) = 2.0 * c.d * (s.y - c.ym);
  return j;
}

// A concrete representative of the family: unit-scale coefficients with
// J1 = -3 and b1 c1 b2 c2 = 2.
inline ModelSpec default_model() {
  ModelSpec spec;
  spec.base = {0.5, +1};
  spec.coeffs = {/*x1p=*/1.0, /*x2p=*/1.0, /*ym=*/1.0,
                 /*a11=*/1.0, /*a12=*/0.0, /*a21=*/0.0, /*a22=*/1.0,
                 /*b1=*/1.0,  /*b2=*/2.0,
                 /*c1=*/1.0,  /*c2=*/1.0,
                 /*d=*/1.0};
  return spec;
}

// Smallest number of saddle passes for which the return box maps inside the
// tangency neighbourhood for coefficients of order one.
inline int model_k_min(const ModelSpec&) { return 5; }

// Return box around the incoming homoclinic point: the y extent shrinks like
// |gamma|^-k so that k local passes land at height ~ym.
inline bool in_return_box(const ModelSpec& spec, const SaddleMultipliers& m, long k,
                          const ModelState& s) {
  const GlobalCoeffs& c = spec.coeffs;
  return std::abs(s.x1 - c.x1p) <= 0.5 && std::abs(s.x2 - c.x2p) <= 0.5 &&
         std::abs(s.y) <= 2.0 * powk(1.0 / std::abs(m.gamma), k) * c.ym;
}

// First-return map: k passes near the saddle followed by the homoclinic
// excursion.
inline ModelState first_return_map(const ModelSpec& spec, const Unfolding& u, long k,
                                   const ModelState& s) {
  if (k < model_k_min(spec))
    throw OutOfRangeError("first_return_map requires k >= " + std::to_string(model_k_min(spec)));
  const SaddleMultipliers m = multipliers_from_unfolding(spec.base, u);
  return global_map(spec.coeffs, u.mu1, local_map_iterate(m, k, s));
}

struct TangencyCertificate {
  double min_height = 0.0;         // extremal height of the image of the local
                                   // unstable manifold over the stable surface
  double second_derivative = 0.0;  // curvature there; equals 2d
};

// Scans the image of the local unstable manifold {x1 = x2 = 0} under the
// global map and locates the extremum of its height. At mu1 = 0 the extremum
// sits at height 0 with curvature 2d: the quadratic tangency.
inline TangencyCertificate homoclinic_tangency_certificate(const ModelSpec& spec,
                                                           double mu1 = 0.0) {
  const GlobalCoeffs& c = spec.coeffs;
  double emax = eta_max(c);
  if (!std::isfinite(emax)) emax = std::max(1.0, std::abs(c.ym));
  const double half = 0.9 * emax;
  const int npts = 4001;
  const double sp = 2.0 * half / (npts - 1);

  auto height = [&](double y) { return global_map(c, mu1, ModelState{0.0, 0.0, y}).y; };

  const double sgn = c.d > 0.0 ? 1.0 : -1.0;
  int best = 0;
  double best_val = sgn * height(c.ym - half);
  for (int i = 1; i < npts; ++i) {
    const double v = sgn * height(c.ym - half + sp * i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  // parabola through the three nodes around the best one; exact for this map
  const int i0 = std::clamp(best, 1, npts - 2);
  const double ym_node = c.ym - half + sp * i0;
  const double hm = height(ym_node - sp), h0 = height(ym_node), hp = height(ym_node + sp);
  const double curv = (hp - 2.0 * h0 + hm) / (sp * sp);
  double y_vertex = ym_node;
  if (curv != 0.0) y_vertex = ym_node - 0.5 * sp * (hp - hm) / (hp - 2.0 * h0 + hm);
  TangencyCertificate cert;
  cert.min_height = height(y_vertex);
  cert.second_derivative = curv;
  return cert;
}

}  // namespace dlab
