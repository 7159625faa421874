#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <complex>

#include "dlab/linalg.hpp"

namespace dlab {

// Roots of x^3 + p2 x^2 + p1 x + p0, computed as eigenvalues of the companion
// matrix. A clustered pair is additionally polished through the derivative
// polynomial: a true double root is a simple root of p', which Newton locates
// to full precision, while the eigensolver only reaches sqrt(eps) there. The
// substitution is kept only when it lowers the residual |p|, so genuinely
// separated pairs are left alone. Sorted by (real, imag).
inline std::array<std::complex<double>, 3> cubic_roots(double p2, double p1, double p0) {
  Eigen::Matrix3d companion;
  companion << 0.0, 0.0, -p0,  //
      1.0, 0.0, -p1,           //
      0.0, 1.0, -p2;
  Eigen::EigenSolver<Eigen::Matrix3d> solver(companion, /*computeEigenvectors=*/false);
  std::array<std::complex<double>, 3> roots;
  for (int i = 0; i < 3; ++i) roots[static_cast<size_t>(i)] = solver.eigenvalues()(i);

  const auto p = [&](std::complex<double> x) { return ((x + p2) * x + p1) * x + p0; };
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      auto& ri = roots[static_cast<size_t>(i)];
      auto& rj = roots[static_cast<size_t>(j)];
      if (std::abs(ri - rj) > 1e-3 * (1.0 + std::abs(ri))) continue;
      std::complex<double> c = 0.5 * (ri + rj);
      for (int it = 0; it < 8; ++it) {
        const std::complex<double> d1 = (3.0 * c + 2.0 * p2) * c + p1;
        const std::complex<double> d2 = 6.0 * c + 2.0 * p2;
        if (std::abs(d2) == 0.0) break;
        c -= d1 / d2;
      }
      if (std::abs(p(c)) <= std::min(std::abs(p(ri)), std::abs(p(rj)))) ri = rj = c;
    }

  std::sort(roots.begin(), roots.end(), [](auto a, auto b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

// Singular values in descending order.
inline std::array<double, 3> singular_values(const Mat3& a) {
  Eigen::Matrix3d e;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) e(i, j) = a(i, j);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(e);
  return {svd.singularValues()(0), svd.singularValues()(1), svd.singularValues()(2)};
}

}  // namespace dlab
