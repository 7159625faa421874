#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>

namespace dlab {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
  friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  friend Vec3 operator*(double c, Vec3 v) { return {c * v.x, c * v.y, c * v.z}; }
  friend bool operator==(Vec3 a, Vec3 b) { return a.x == b.x && a.y == b.y && a.z == b.z; }
};

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline double max_abs(Vec3 v) { return std::max({std::abs(v.x), std::abs(v.y), std::abs(v.z)}); }
inline bool all_finite(Vec3 v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

// Dense 3x3 matrix, row major.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  double& operator()(int i, int j) { return m[static_cast<size_t>(i)][static_cast<size_t>(j)]; }
  double operator()(int i, int j) const {
    return m[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }

  static Mat3 identity() {
    Mat3 a;
    a(0, 0) = a(1, 1) = a(2, 2) = 1.0;
    return a;
  }
  static Mat3 diagonal(double d0, double d1, double d2) {
    Mat3 a;
    a(0, 0) = d0;
    a(1, 1) = d1;
    a(2, 2) = d2;
    return a;
  }

  Vec3 col(int j) const { return {(*this)(0, j), (*this)(1, j), (*this)(2, j)}; }
  void set_col(int j, Vec3 v) {
    (*this)(0, j) = v.x;
    (*this)(1, j) = v.y;
    (*this)(2, j) = v.z;
  }

  friend Vec3 operator*(const Mat3& a, Vec3 v) {
    return {a(0, 0) * v.x + a(0, 1) * v.y + a(0, 2) * v.z,
            a(1, 0) * v.x + a(1, 1) * v.y + a(1, 2) * v.z,
            a(2, 0) * v.x + a(2, 1) * v.y + a(2, 2) * v.z};
  }
  friend Mat3 operator*(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        c(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j) + a(i, 2) * b(2, j);
    return c;
  }
  friend Mat3 operator-(const Mat3& a, const Mat3& b) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
  }
};

inline double det(const Mat3& a) {
  return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
         a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
         a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
}

inline double max_abs_entry(const Mat3& a) {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r = std::max(r, std::abs(a(i, j)));
  return r;
}

// Induced infinity norm: max absolute row sum.
inline double inf_norm(const Mat3& a) {
  double r = 0.0;
  for (int i = 0; i < 3; ++i)
    r = std::max(r, std::abs(a(i, 0)) + std::abs(a(i, 1)) + std::abs(a(i, 2)));
  return r;
}

struct QR3 {
  Mat3 q;  // orthonormal columns
  Mat3 r;  // upper triangular, nonnegative diagonal
};

// Modified Gram-Schmidt on the columns. A numerically zero column is replaced
// by a deterministic unit vector orthogonal to the previous ones so that the
// factorization can continue; its r-diagonal entry is floored at `floor_r`.
inline QR3 qr_mgs(const Mat3& a, double floor_r = 1e-300) {
  QR3 out;
  std::array<Vec3, 3> v = {a.col(0), a.col(1), a.col(2)};
  std::array<Vec3, 3> q;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < j; ++i) {
      const double rij = dot(q[static_cast<size_t>(i)], v[static_cast<size_t>(j)]);
      out.r(i, j) = rij;
      v[static_cast<size_t>(j)] = v[static_cast<size_t>(j)] - rij * q[static_cast<size_t>(i)];
    }
    double rjj = norm(v[static_cast<size_t>(j)]);
    if (rjj > 0.0) {
      q[static_cast<size_t>(j)] = (1.0 / rjj) * v[static_cast<size_t>(j)];
    } else {
      // pick the axis least represented in the existing columns
      Vec3 cand{1, 0, 0};
      double best = 2.0;
      const std::array<Vec3, 3> axes = {Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};
      for (Vec3 e : axes) {
        double overlap = 0.0;
        for (int i = 0; i < j; ++i) overlap += std::abs(dot(q[static_cast<size_t>(i)], e));
        if (overlap < best) {
          best = overlap;
          cand = e;
        }
      }
      for (int i = 0; i < j; ++i)
        cand = cand - dot(q[static_cast<size_t>(i)], cand) * q[static_cast<size_t>(i)];
      q[static_cast<size_t>(j)] = (1.0 / norm(cand)) * cand;
    }
    out.r(j, j) = std::max(rjj, floor_r);
    out.q.set_col(j, q[static_cast<size_t>(j)]);
  }
  return out;
}

inline double powk(double x, long k) {
  double r = 1.0;
  for (long i = 0; i < k; ++i) r *= x;
  return r;
}

// A discrete-time system: one application of the map plus its differential.
template <typename M>
concept PhaseMap = requires(const M& m, const Vec3& s) {
  { m.apply(s) } -> std::same_as<Vec3>;
  { m.differential(s) } -> std::same_as<Mat3>;
};

}  // namespace dlab
