#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "dlab/errors.hpp"
#include "dlab/henon.hpp"
#include "dlab/lyapunov.hpp"

namespace dlab {

struct SweepAxis {
  std::string name;
  double from = 0.0;
  double to = 0.0;
  int steps = 1;

  double value(int i) const {
    if (steps <= 1) return from;
    return from + (to - from) * (static_cast<double>(i) / (steps - 1));
  }
};

struct SweepCell {
  double p1 = 0.0, p2 = 0.0;
  double lmax = std::numeric_limits<double>::quiet_NaN();
  AttractorKind kind = AttractorKind::diverged;
  long escape_step = -1;
  bool converged = false;
};

// Row-major over (axis1, axis2); one record per grid cell.
struct SweepResult {
  SweepAxis axis1, axis2;
  std::vector<SweepCell> cells;

  const SweepCell& at(int i, int j) const {
    return cells[static_cast<size_t>(i) * static_cast<size_t>(axis2.steps) +
                 static_cast<size_t>(j)];
  }
};

// Classifies the attractor on every cell of a two-parameter grid. Cells are
// independent and written into a preallocated table, so the result is
// bit-identical for any thread count.
template <typename Family>
SweepResult sweep(Family&& family, const SweepAxis& axis1, const SweepAxis& axis2, Vec3 s0,
                  const ClassifyOptions& opts = {}, int threads = 1) {
  if (axis1.steps < 1 || axis2.steps < 1) throw OutOfRangeError("sweep axes must be nonempty");
  SweepResult res;
  res.axis1 = axis1;
  res.axis2 = axis2;
  res.cells.resize(static_cast<size_t>(axis1.steps) * static_cast<size_t>(axis2.steps));

  auto run_cell = [&](size_t idx) {
    const int i = static_cast<int>(idx) / axis2.steps;
    const int j = static_cast<int>(idx) % axis2.steps;
    SweepCell cell;
    cell.p1 = axis1.value(i);
    cell.p2 = axis2.value(j);
    const OrbitClass oc = classify_attractor(family(cell.p1, cell.p2), s0, opts);
    cell.kind = oc.kind;
    cell.escape_step = oc.escape_step;
    cell.converged = oc.converged;
    if (oc.kind != AttractorKind::diverged) cell.lmax = oc.leading;
    res.cells[idx] = cell;
  };

  const size_t total = res.cells.size();
  const int nthreads = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  if (nthreads == 1) {
    for (size_t idx = 0; idx < total; ++idx) run_cell(idx);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t) {
      pool.emplace_back([&, t] {
        for (size_t idx = static_cast<size_t>(t); idx < total; idx += static_cast<size_t>(nthreads))
          run_cell(idx);
      });
    }
    for (auto& th : pool) th.join();
  }
  return res;
}

// Henon-map family with two parameters varied by name (m1, m2 or b) and the
// third held fixed.
inline SweepResult henon_sweep(const HenonParams& fixed, const SweepAxis& axis1,
                               const SweepAxis& axis2, Vec3 s0, const ClassifyOptions& opts = {},
                               int threads = 1) {
  auto field = [](const std::string& name) -> double HenonParams::* {
    if (name == "m1") return &HenonParams::m1;
    if (name == "m2") return &HenonParams::m2;
    if (name == "b") return &HenonParams::b;
    throw OutOfRangeError("unknown sweep axis '" + name + "'; expected m1, m2 or b");
  };
  const auto f1 = field(axis1.name);
  const auto f2 = field(axis2.name);
  if (f1 == f2) throw OutOfRangeError("sweep axes must vary different parameters");
  auto family = [&fixed, f1, f2](double p1, double p2) {
    HenonParams p = fixed;
    p.*f1 = p1;
    p.*f2 = p2;
    return HenonSystem{p};
  };
  return sweep(family, axis1, axis2, s0, opts, threads);
}

}  // namespace dlab
