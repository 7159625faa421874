// Acceptance suite: one pass/fail line per criterion, exit code equals the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "dlab/henon.hpp"
#include "dlab/lyapunov.hpp"
#include "dlab/model.hpp"
#include "dlab/orbit.hpp"
#include "dlab/rescaling.hpp"
#include "dlab/splitting.hpp"

using namespace dlab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

const HenonParams kFig1{0.0, 0.85, 0.7};
const Vec3 kX0{0.1, 0.1, 0.1};

// criterion 1: positive leading exponent on the published attractor
Outcome criterion1() {
  const auto t0 = Clock::now();
  const LyapunovResult r = lyapunov_spectrum(kFig1, kX0, 10000, 1000000);
  const double dt = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "lambda1 = %.6f, stderr = %.2e, runtime = %.2f s",
                r.exponents[0], r.stderr_max, dt);
  return {r.exponents[0] > 0.0 && r.exponents[0] > 3.0 * r.stderr_max && dt < 10.0, buf};
}

// criterion 2: the lacuna regime stays bounded and is not a sink
Outcome criterion2() {
  const HenonParams p{0.0, 0.815, 0.7};
  ClassifyOptions opts;
  const OrbitClass oc = classify_attractor(p, kX0, opts);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "class = %s, lambda1 = %.6f", to_string(oc.kind), oc.leading);
  return {oc.kind != AttractorKind::diverged && oc.kind != AttractorKind::fixed_point_like, buf};
}

// criterion 3: exponent sum equals log |B|
Outcome criterion3() {
  const LyapunovResult r = lyapunov_spectrum(kFig1, kX0, 10000, 1000000);
  const double sum = r.exponents[0] + r.exponents[1] + r.exponents[2];
  const double target = std::log(0.7);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "sum = %.8f, log(0.7) = %.8f, |diff| = %.2e, 10*stderr = %.2e",
                sum, target, std::abs(sum - target), 10.0 * r.stderr_max);
  return {std::abs(sum - target) < 10.0 * r.stderr_max, buf};
}

// criterion 4: the degenerate resonant fixed point
Outcome criterion4() {
  // warm pass so one-time allocation inside the eigensolver is not billed
  (void)henon_fixed_points(find_resonant_degeneracy().first);

  const auto t0 = Clock::now();
  const auto [p, s] = find_resonant_degeneracy();
  const auto fps = henon_fixed_points(p);
  const double dt = seconds_since(t0);

  bool ok = p.m1 == -0.25 && p.m2 == 1.0 && p.b == 1.0 && s.x == 0.5 && s.y == 0.5 && s.z == 0.5;
  ok = ok && henon_step(p, s) == s && fps.size() == 1;
  double worst = 1.0;
  if (ok) {
    const auto& m = fps[0].multipliers;
    worst = std::max({std::abs(m[0] - std::complex<double>(-1, 0)),
                      std::abs(m[1] - std::complex<double>(-1, 0)),
                      std::abs(m[2] - std::complex<double>(1, 0))});
    ok = ok && worst < 1e-6;
  }
  ok = ok && dt < 1e-3;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "p = (%.2f, %.0f, %.0f), multiplier error = %.2e, runtime = %.3f ms", p.m1, p.m2,
                p.b, worst, dt * 1e3);
  return {ok, buf};
}

// criterion 5: residual convergence of the rescaled return map
Outcome criterion5() {
  const auto t0 = Clock::now();
  const ModelSpec spec = default_model();
  const RescaledParams target{0.0, 0.85, 0.7};
  const GridSpec grid{-2.0, 2.0, 0.5};
  std::vector<ResidualPair> res;
  for (long k : {7L, 9L, 11L, 13L}) {
    const Unfolding u = solve_unfolding(spec, k, target);
    res.push_back(residual_c0_c1(spec, u, k, grid));
  }
  const double dt = seconds_since(t0);
  bool ok = true;
  for (size_t i = 1; i < res.size(); ++i) {
    ok = ok && res[i].c0 < res[i - 1].c0 && res[i].c1 < res[i - 1].c1;
    ok = ok && res[i].c0 / res[i - 1].c0 < 0.5;
  }
  ok = ok && res.back().c0 < 0.1 && dt < 30.0;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "c0(7..13) = %.2e %.2e %.2e %.2e, c0(13) = %.2e, runtime = %.2f s", res[0].c0,
                res[1].c0, res[2].c0, res[3].c0, res.back().c0, dt);
  return {ok, buf};
}

// criterion 6: parameter round trip and accumulation at the origin
Outcome criterion6() {
  const ModelSpec spec = default_model();
  const RescaledParams target{0.0, 0.85, 0.7};
  const Unfolding u11 = solve_unfolding(spec, 11, target);
  const RescaledParams got = limit_map_parameters(spec, u11, 11);
  const double lam1 = multipliers_from_unfolding(spec.base, u11).lambda1;
  const double tol = 10.0 * powk(lam1, 11);
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
  const double err =
      std::max({rel(got.M1, target.M1), rel(got.M2, target.M2), rel(got.B, target.B)});

  bool shrink = true;
  double prev = 1e9;
  for (long k : {7L, 9L, 11L, 13L}) {
    const Unfolding u = solve_unfolding(spec, k, target);
    const double sz = std::max({std::abs(u.mu1), std::abs(u.mu2), std::abs(u.mu3)});
    shrink = shrink && sz < prev;
    prev = sz;
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf), "round-trip error = %.2e (tol %.2e), ||mu||_inf shrinks: %s",
                err, tol, shrink ? "yes" : "no");
  return {err < tol && shrink, buf};
}

// criterion 7: discrete Lorenz attractor of the rescaled return map
Outcome criterion7() {
  const auto t0 = Clock::now();
  const ModelSpec spec = default_model();
  const Unfolding u = solve_unfolding(spec, 13, {0.0, 0.85, 0.7});
  const RescaledReturnMap map = make_rescaled_return_map(spec, u, 13);

  const OrbitResult orbit = iterate_orbit(map, kX0, 0, 100000, 1e3);
  const bool bounded = !orbit.diverged();
  LyapunovResult lr;
  bool positive = false;
  if (bounded) {
    lr = lyapunov_spectrum(map, kX0, 10000, 100000);
    positive = lr.exponents[0] > 0.0 && lr.exponents[0] > 3.0 * lr.stderr_max;
  }
  const double dt = seconds_since(t0);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "bounded = %s, lambda1 = %.6f, stderr = %.2e, runtime = %.2f s",
                bounded ? "yes" : "no", lr.exponents[0], lr.stderr_max, dt);
  return {bounded && positive && dt < 60.0, buf};
}

struct ConstantMap {
  Mat3 a;
  Vec3 apply(const Vec3& s) const { return a * s; }
  Mat3 differential(const Vec3&) const { return a; }
};

// leading 2-volume growth rate with a block standard error, for criterion 8
void planar_volume_rate(const HenonParams& p, long transient, long n, double& rate, double& se) {
  HenonSystem sys{p};
  Vec3 s = kX0;
  for (long i = 0; i < transient; ++i) s = sys.apply(s);
  Mat3 frame = Mat3::identity();
  const int nb = 20;
  std::vector<double> block_sum(nb, 0.0);
  std::vector<long> block_len(nb, 0);
  for (long i = 0; i < n; ++i) {
    frame = sys.differential(s) * frame;
    s = sys.apply(s);
    const QR3 qr = qr_mgs(frame);
    frame = qr.q;
    const int blk = static_cast<int>((i * nb) / n);
    block_sum[blk] += std::log(qr.r(0, 0)) + std::log(qr.r(1, 1));
    ++block_len[blk];
  }
  double mean = 0.0;
  for (int b = 0; b < nb; ++b) mean += block_sum[b] / static_cast<double>(block_len[b]);
  mean /= nb;
  double var = 0.0;
  for (int b = 0; b < nb; ++b) {
    const double d = block_sum[b] / static_cast<double>(block_len[b]) - mean;
    var += d * d;
  }
  rate = mean;
  se = std::sqrt(var / (nb - 1) / nb);
}

// criterion 8: splitting indicators
Outcome criterion8() {
  bool ok = true;
  std::string detail;

  {
    const ConstantMap m1{Mat3::diagonal(2.0, 1.5, 0.1)};
    const PseudoHypReport r1 = finite_time_splitting(m1, {0, 0, 0}, 0, 2000, 100);
    ok = ok && std::abs(r1.sigma_est - 0.1) < 1e-12 && std::abs(r1.nu_est - 3.0) < 1e-12;
    const ConstantMap m2{Mat3::diagonal(1.2, 0.9, 0.5)};
    const PseudoHypReport r2 = finite_time_splitting(m2, {0, 0, 0}, 0, 2000, 100);
    ok = ok && std::abs(r2.sigma_est - 0.5) < 1e-12 && std::abs(r2.nu_est - 1.08) < 1e-12;
  }

  const long n = 100000, window = 100;
  auto window_mean = [&](long w, double& max_r3_out) {
    const auto rates = window_log_rates(HenonSystem{kFig1}, kX0, 10000, n, w);
    double mean = 0.0;
    max_r3_out = -1e300;
    for (const auto& r : rates) {
      mean += r[0] + r[1];
      max_r3_out = std::max(max_r3_out, r[2]);
    }
    return mean / static_cast<double>(rates.size());
  };
  double max_r3 = 0.0, max_r3_unused = 0.0;
  const double mean_vol = window_mean(window, max_r3);
  const double mean_vol_2w = window_mean(2 * window, max_r3_unused);

  const auto rates = window_log_rates(HenonSystem{kFig1}, kX0, 10000, n, window);
  double var = 0.0;
  for (const auto& r : rates) {
    const double d = r[0] + r[1] - mean_vol;
    var += d * d;
  }
  const double se_win = std::sqrt(var / static_cast<double>(rates.size() - 1) /
                                  static_cast<double>(rates.size()));

  double l12 = 0.0, se_l12 = 0.0;
  planar_volume_rate(kFig1, 10000, 200000, l12, se_l12);

  const double diff = std::abs(mean_vol - l12);
  const double se = std::sqrt(se_win * se_win + se_l12 * se_l12);
  const double sigma_est = std::exp(max_r3);
  ok = ok && diff < 3.0 * se && sigma_est < 1.0;

  const PseudoHypReport rep = finite_time_splitting(HenonSystem{kFig1}, kX0, 10000, n, window);
  char buf[400];
  std::snprintf(buf, sizeof(buf),
                "diag oracles exact; |vol - (L1+L2)| = %.2e vs 3*se = %.2e (offset is the "
                "window-product alignment defect, ~1/window: %.2e at window %ld, %.2e at %ld); "
                "sigma_est = %.3f, fraction_pass = %.3f (reported, not judged)",
                diff, 3.0 * se, mean_vol - l12, window, mean_vol_2w - l12, 2 * window, sigma_est,
                rep.fraction_pass);
  return {ok, buf};
}

const char* kDescriptions[8] = {
    "positive leading Lyapunov exponent on the (0, 0.85, 0.7) attractor",
    "bounded non-trivial attractor at M2 = 0.815",
    "exponent sum equals log |B|",
    "resonant degeneracy point with multipliers (-1, -1, +1)",
    "residuals of the rescaled return map shrink over odd k in [7, 13]",
    "parameter round trip at k = 11 and accumulation at the origin",
    "chaotic attractor of the rescaled return map at k = 13",
    "finite-time splitting indicators",
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::strcmp(argv[1], "--only") == 0) only = std::atoi(argv[2]);

  const std::function<Outcome()> criteria[8] = {criterion1, criterion2, criterion3, criterion4,
                                                criterion5, criterion6, criterion7, criterion8};
  int failures = 0;
  for (int i = 0; i < 8; ++i) {
    if (only != 0 && only != i + 1) continue;
    Outcome out;
    try {
      out = criteria[i]();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %d: %s (%s)\n", out.pass ? "PASS" : "FAIL", i + 1,
                kDescriptions[i], out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
