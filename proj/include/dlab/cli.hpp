#pragma once

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "dlab/config.hpp"
#include "dlab/errors.hpp"
#include "dlab/henon.hpp"
#include "dlab/io.hpp"
#include "dlab/lyapunov.hpp"
#include "dlab/model.hpp"
#include "dlab/orbit.hpp"
#include "dlab/rescaling.hpp"
#include "dlab/splitting.hpp"
#include "dlab/sweep.hpp"
#include "dlab/version.hpp"

namespace dlab {

namespace cli_detail {

inline std::string join_args(const std::vector<std::string>& args) {
  std::string s = kToolName;
  for (const auto& a : args) {
    s += ' ';
    s += a;
  }
  return s;
}

inline Vec3 to_vec3(const std::vector<double>& v) { return {v[0], v[1], v[2]}; }

struct LoadedModel {
  ModelSpec spec;
  std::string hash = "default";
};

inline LoadedModel load_model(const std::string& config_path) {
  LoadedModel lm;
  if (config_path.empty()) {
    lm.spec = default_model();
    return lm;
  }
  std::ifstream in(config_path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + config_path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  lm.spec = parse_model(text);
  lm.hash = hash_hex(fnv1a64(text));
  return lm;
}

inline int threads_from_env() {
  const char* env = std::getenv("THREADS");
  if (env == nullptr) {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
  }
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || v < 1)
    throw ConfigError("THREADS must be a positive integer, got '" + std::string(env) + "'");
  return static_cast<int>(v);
}

inline SweepAxis parse_axis(const std::string& text) {
  // name=from:to:steps
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("axis '" + text + "': expected name=from:to:steps");
  SweepAxis ax;
  ax.name = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = rest.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw ConfigError("axis '" + text + "': expected name=from:to:steps");
  try {
    ax.from = std::stod(rest.substr(0, c1));
    ax.to = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    ax.steps = std::stoi(rest.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ConfigError("axis '" + text + "': cannot parse numbers");
  }
  if (ax.steps < 1) throw ConfigError("axis '" + text + "': steps must be >= 1");
  return ax;
}

inline void print_lyapunov(const LyapunovResult& r, double log_abs_b) {
  std::printf("lambda1 = %s\n", format_double17(r.exponents[0]).c_str());
  std::printf("lambda2 = %s\n", format_double17(r.exponents[1]).c_str());
  std::printf("lambda3 = %s\n", format_double17(r.exponents[2]).c_str());
  std::printf("stderr  = %s\n", format_double17(r.stderr_max).c_str());
  const double sum = r.exponents[0] + r.exponents[1] + r.exponents[2];
  std::printf("sum     = %s (log|B| = %s)\n", format_double17(sum).c_str(),
              format_double17(log_abs_b).c_str());
  std::printf("converged = %s\n", r.converged ? "true" : "false");
}

}  // namespace cli_detail

// Entry point of the command-line tool. Returns the process exit code:
// 0 success, 1 usage or configuration error, 2 numerical failure.
inline int run(std::vector<std::string> args) {
  using cli_detail::to_vec3;

  OutputMeta meta;
  meta.command_line = cli_detail::join_args(args);

  CLI::App app{"numerical laboratory for discrete Lorenz attractors in "
               "three-dimensional Henon-like maps and homoclinic return maps"};
  app.require_subcommand(1);

  // ---- shared option state ----
  HenonParams hp;
  std::vector<double> x0 = {0.1, 0.1, 0.1};
  long transient = 10000;
  long nsteps = 100000;
  double diverge_at = 1e3;
  std::string out_path;
  std::string format = "csv";
  std::string config_path;
  int blocks = 20;
  double stderr_tol = 1e-2;

  auto add_henon = [&](CLI::App* cmd, bool required = true) {
    auto* o1 = cmd->add_option("--m1", hp.m1, "constant term M1");
    auto* o2 = cmd->add_option("--m2", hp.m2, "linear coefficient M2");
    auto* o3 = cmd->add_option("--b", hp.b, "Jacobian B");
    if (required) {
      o1->required();
      o2->required();
      o3->required();
    }
  };
  auto add_x0 = [&](CLI::App* cmd) {
    cmd->add_option("--x0", x0, "initial state x,y,z")->delimiter(',')->expected(3);
  };
  auto add_out = [&](CLI::App* cmd, bool required) {
    auto* o = cmd->add_option("--out", out_path, "output file");
    if (required) o->required();
    cmd->add_option("--format", format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  // ---- iterate ----
  auto* cmd_iterate = app.add_subcommand("iterate", "iterate the Henon map and export the orbit");
  add_henon(cmd_iterate);
  add_x0(cmd_iterate);
  cmd_iterate->add_option("--transient", transient, "discarded steps");
  cmd_iterate->add_option("--n", nsteps, "recorded steps");
  cmd_iterate->add_option("--diverge-at", diverge_at, "divergence bound");
  add_out(cmd_iterate, true);

  // ---- lyapunov ----
  auto* cmd_lyap = app.add_subcommand("lyapunov", "Lyapunov spectrum of the Henon map");
  add_henon(cmd_lyap);
  add_x0(cmd_lyap);
  long lyap_n = 1000000;
  cmd_lyap->add_option("--transient", transient, "discarded steps");
  cmd_lyap->add_option("--n", lyap_n, "measured steps");
  cmd_lyap->add_option("--diverge-at", diverge_at, "divergence bound");
  cmd_lyap->add_option("--blocks", blocks, "blocks for the standard error");
  cmd_lyap->add_option("--tol", stderr_tol, "stderr tolerance for the converged flag");
  add_out(cmd_lyap, false);

  // ---- fixed-points ----
  auto* cmd_fp = app.add_subcommand("fixed-points", "fixed points and multipliers");
  add_henon(cmd_fp);
  add_out(cmd_fp, false);

  // ---- classify ----
  auto* cmd_classify = app.add_subcommand("classify", "classify the attractor of an orbit");
  add_henon(cmd_classify);
  add_x0(cmd_classify);
  long classify_n = 1000000;
  cmd_classify->add_option("--transient", transient, "discarded steps");
  cmd_classify->add_option("--n", classify_n, "measured steps");
  cmd_classify->add_option("--diverge-at", diverge_at, "divergence bound");
  add_out(cmd_classify, false);

  // ---- sweep ----
  auto* cmd_sweep = app.add_subcommand("sweep", "two-parameter attractor sweep");
  std::string axis1_text, axis2_text;
  cmd_sweep->add_option("--axis1", axis1_text, "first axis, name=from:to:steps")->required();
  cmd_sweep->add_option("--axis2", axis2_text, "second axis, name=from:to:steps")->required();
  add_henon(cmd_sweep, /*required=*/false);
  add_x0(cmd_sweep);
  long sweep_transient = 1000;
  long sweep_n = 100000;
  cmd_sweep->add_option("--transient", sweep_transient, "discarded steps per cell");
  cmd_sweep->add_option("--n", sweep_n, "measured steps per cell");
  cmd_sweep->add_option("--diverge-at", diverge_at, "divergence bound");
  add_out(cmd_sweep, true);

  // ---- return-map ----
  auto* cmd_rm = app.add_subcommand("return-map", "evaluate or iterate the rescaled return map");
  long rk = 0;
  Unfolding mu;
  RescaledParams target;
  std::vector<double> point;
  cmd_rm->add_option("--config", config_path, "model configuration file");
  cmd_rm->add_option("--k", rk, "number of saddle passes")->required();
  auto* rm_mu1 = cmd_rm->add_option("--mu1", mu.mu1, "unfolding parameter mu1");
  cmd_rm->add_option("--mu2", mu.mu2, "unfolding parameter mu2")->needs(rm_mu1);
  cmd_rm->add_option("--mu3", mu.mu3, "unfolding parameter mu3")->needs(rm_mu1);
  auto* rm_M1 = cmd_rm->add_option("--M1", target.M1, "target M1 (solves for mu)");
  cmd_rm->add_option("--M2", target.M2, "target M2")->needs(rm_M1);
  cmd_rm->add_option("--B", target.B, "target B")->needs(rm_M1);
  rm_M1->excludes(rm_mu1);
  cmd_rm->add_option("--point", point, "evaluate one application at X1,X2,Y")
      ->delimiter(',')
      ->expected(3);
  auto* rm_x0 = cmd_rm->add_option("--x0", x0, "iterate from X1,X2,Y")
                    ->delimiter(',')
                    ->expected(3);
  cmd_rm->add_option("--transient", transient, "discarded steps");
  cmd_rm->add_option("--n", nsteps, "recorded steps");
  cmd_rm->add_option("--diverge-at", diverge_at, "divergence bound");
  add_out(cmd_rm, false);

  // ---- verify-rescaling ----
  auto* cmd_vr = app.add_subcommand("verify-rescaling",
                                    "residuals of the rescaled return map against the limit map");
  std::vector<long> klist = {7, 9, 11, 13};
  double box_half = 2.0, box_step = 0.5;
  cmd_vr->add_option("--config", config_path, "model configuration file");
  cmd_vr->add_option("--k", klist, "comma-separated list of k values")->delimiter(',');
  cmd_vr->add_option("--M1", target.M1, "target M1")->required();
  cmd_vr->add_option("--M2", target.M2, "target M2")->required();
  cmd_vr->add_option("--B", target.B, "target B")->required();
  cmd_vr->add_option("--box", box_half, "verification box half width");
  cmd_vr->add_option("--step", box_step, "verification grid step");
  add_out(cmd_vr, false);

  // ---- delta-k ----
  auto* cmd_dk = app.add_subcommand("delta-k",
                                    "solve for the unfolding parameters realizing a target");
  cmd_dk->add_option("--config", config_path, "model configuration file");
  cmd_dk->add_option("--k", rk, "number of saddle passes")->required();
  cmd_dk->add_option("--M1", target.M1, "target M1")->required();
  cmd_dk->add_option("--M2", target.M2, "target M2")->required();
  cmd_dk->add_option("--B", target.B, "target B")->required();
  add_out(cmd_dk, false);

  // ---- splitting ----
  auto* cmd_split = app.add_subcommand("splitting", "finite-time splitting indicators");
  add_henon(cmd_split);
  add_x0(cmd_split);
  long split_n = 100000;
  long window = 100;
  cmd_split->add_option("--transient", transient, "discarded steps");
  cmd_split->add_option("--n", split_n, "measured steps");
  cmd_split->add_option("--window", window, "window length");
  cmd_split->add_option("--diverge-at", diverge_at, "divergence bound");
  add_out(cmd_split, false);

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cmd_iterate) {
      const OrbitResult orbit =
          iterate_orbit(HenonSystem{hp}, to_vec3(x0), transient, nsteps, diverge_at);
      Table t;
      t.columns = {"n", "x", "y", "z"};
      for (size_t i = 0; i < orbit.states.size(); ++i)
        t.add_row({static_cast<long long>(i), orbit.states[i].x, orbit.states[i].y,
                   orbit.states[i].z});
      write_table(out_path, format, t, meta);
      if (orbit.diverged())
        std::printf("orbit diverged at step %ld; wrote %zu recorded states\n", orbit.diverged_at,
                    orbit.states.size());
      else
        std::printf("wrote %zu states to %s\n", orbit.states.size(), out_path.c_str());
    } else if (*cmd_lyap) {
      LyapunovOptions lo;
      lo.diverge_at = diverge_at;
      lo.blocks = blocks;
      lo.stderr_tol = stderr_tol;
      const LyapunovResult r = lyapunov_spectrum(HenonSystem{hp}, to_vec3(x0), transient, lyap_n, lo);
      cli_detail::print_lyapunov(r, std::log(std::abs(hp.b)));
      if (!out_path.empty()) {
        Table t;
        t.columns = {"lambda1", "lambda2", "lambda3", "stderr_max", "sum", "log_abs_b",
                     "n", "transient", "converged"};
        t.add_row({r.exponents[0], r.exponents[1], r.exponents[2], r.stderr_max,
                   r.exponents[0] + r.exponents[1] + r.exponents[2], std::log(std::abs(hp.b)),
                   static_cast<long long>(r.n_iterations), static_cast<long long>(r.n_transient),
                   std::string(r.converged ? "true" : "false")});
        write_table(out_path, format, t, meta);
      }
    } else if (*cmd_fp) {
      const auto fps = henon_fixed_points(hp);
      std::printf("%zu fixed point(s)\n", fps.size());
      Table t;
      t.columns = {"x", "y", "z", "mult1_re", "mult1_im", "mult2_re", "mult2_im",
                   "mult3_re", "mult3_im", "multiplicity"};
      for (const auto& fp : fps) {
        std::printf("  (%s, %s, %s)  multiplicity %d\n", format_double17(fp.state.x).c_str(),
                    format_double17(fp.state.y).c_str(), format_double17(fp.state.z).c_str(),
                    fp.multiplicity);
        for (const auto& m : fp.multipliers)
          std::printf("    multiplier %s %s %si\n", format_double17(m.real()).c_str(),
                      m.imag() < 0 ? "-" : "+", format_double17(std::abs(m.imag())).c_str());
        t.add_row({fp.state.x, fp.state.y, fp.state.z, fp.multipliers[0].real(),
                   fp.multipliers[0].imag(), fp.multipliers[1].real(), fp.multipliers[1].imag(),
                   fp.multipliers[2].real(), fp.multipliers[2].imag(),
                   static_cast<long long>(fp.multiplicity)});
      }
      if (!out_path.empty()) write_table(out_path, format, t, meta);
    } else if (*cmd_classify) {
      ClassifyOptions co;
      co.transient = transient;
      co.n = classify_n;
      co.lyap.diverge_at = diverge_at;
      const OrbitClass oc = classify_attractor(HenonSystem{hp}, to_vec3(x0), co);
      std::printf("class = %s\n", to_string(oc.kind));
      if (oc.kind == AttractorKind::diverged)
        std::printf("escape_step = %ld\n", oc.escape_step);
      else
        std::printf("lmax = %s (stderr %s, converged %s)\n", format_double17(oc.leading).c_str(),
                    format_double17(oc.stderr_max).c_str(), oc.converged ? "true" : "false");
      if (!out_path.empty()) {
        Table t;
        t.columns = {"class", "lmax", "stderr_max", "converged", "escape_step"};
        t.add_row({std::string(to_string(oc.kind)), oc.leading, oc.stderr_max,
                   std::string(oc.converged ? "true" : "false"),
                   static_cast<long long>(oc.escape_step)});
        write_table(out_path, format, t, meta);
      }
    } else if (*cmd_sweep) {
      const SweepAxis ax1 = cli_detail::parse_axis(axis1_text);
      const SweepAxis ax2 = cli_detail::parse_axis(axis2_text);
      for (const std::string& n : {ax1.name, ax2.name}) {
        if ((n == "m1" && cmd_sweep->count("--m1")) || (n == "m2" && cmd_sweep->count("--m2")) ||
            (n == "b" && cmd_sweep->count("--b")))
          throw ConfigError("parameter '" + n + "' is swept by an axis; do not also fix it");
      }
      ClassifyOptions co;
      co.transient = sweep_transient;
      co.n = sweep_n;
      co.lyap.diverge_at = diverge_at;
      const SweepResult res = henon_sweep(hp, ax1, ax2, to_vec3(x0), co,
                                          cli_detail::threads_from_env());
      Table t;
      t.columns = {"p1", "p2", "lmax", "class", "escape_step"};
      for (const auto& cell : res.cells)
        t.add_row({cell.p1, cell.p2, cell.lmax, std::string(to_string(cell.kind)),
                   static_cast<long long>(cell.escape_step)});
      write_table(out_path, format, t, meta);
      std::printf("wrote %zu cells to %s\n", res.cells.size(), out_path.c_str());
    } else if (*cmd_rm) {
      const cli_detail::LoadedModel lm = cli_detail::load_model(config_path);
      meta.config_hash = lm.hash;
      Unfolding u = mu;
      if (rm_M1->count() > 0) {
        u = solve_unfolding(lm.spec, rk, target);
        std::printf("mu1 = %s\nmu2 = %s\nmu3 = %s\n", format_double17(u.mu1).c_str(),
                    format_double17(u.mu2).c_str(), format_double17(u.mu3).c_str());
      }
      const RescaledReturnMap map = make_rescaled_return_map(lm.spec, u, rk);
      std::printf("M1 = %s\nM2 = %s\nB = %s\n", format_double17(map.params.M1).c_str(),
                  format_double17(map.params.M2).c_str(), format_double17(map.params.B).c_str());
      std::printf("residual coefficients: e11 = %s, e12 = %s, e22 = %s\n",
                  format_double17(map.e11).c_str(), format_double17(map.e12).c_str(),
                  format_double17(map.e22).c_str());
      if (!point.empty()) {
        const Vec3 img = map.apply(to_vec3(point));
        std::printf("image = (%s, %s, %s)\n", format_double17(img.x).c_str(),
                    format_double17(img.y).c_str(), format_double17(img.z).c_str());
      }
      if (rm_x0->count() > 0) {
        if (out_path.empty()) throw ConfigError("return-map --x0 requires --out");
        const OrbitResult orbit = iterate_orbit(map, to_vec3(x0), transient, nsteps, diverge_at);
        Table t;
        t.columns = {"n", "x", "y", "z"};
        for (size_t i = 0; i < orbit.states.size(); ++i)
          t.add_row({static_cast<long long>(i), orbit.states[i].x, orbit.states[i].y,
                     orbit.states[i].z});
        write_table(out_path, format, t, meta);
        if (orbit.diverged())
          std::printf("orbit diverged at step %ld\n", orbit.diverged_at);
        else
          std::printf("wrote %zu states to %s\n", orbit.states.size(), out_path.c_str());
      }
    } else if (*cmd_vr) {
      const cli_detail::LoadedModel lm = cli_detail::load_model(config_path);
      meta.config_hash = lm.hash;
      Table t;
      t.columns = {"k", "c0", "c1", "M1", "M2", "B", "mu1", "mu2", "mu3"};
      for (const long k : klist) {
        const Unfolding u = solve_unfolding(lm.spec, k, target);
        const GridSpec grid{-box_half, box_half, box_step};
        const ResidualPair res = residual_c0_c1(lm.spec, u, k, grid);
        const RescaledParams got = limit_map_parameters(lm.spec, u, k);
        std::printf("k = %2ld: c0 = %.6e, c1 = %.6e\n", k, res.c0, res.c1);
        t.add_row({static_cast<long long>(k), res.c0, res.c1, got.M1, got.M2, got.B, u.mu1,
                   u.mu2, u.mu3});
      }
      if (!out_path.empty()) write_table(out_path, format, t, meta);
    } else if (*cmd_dk) {
      const cli_detail::LoadedModel lm = cli_detail::load_model(config_path);
      meta.config_hash = lm.hash;
      const Unfolding u = solve_unfolding(lm.spec, rk, target);
      const RescaledParams got = limit_map_parameters(lm.spec, u, rk);
      const double e1 = detail::rel_err(got.M1, target.M1);
      const double e2 = detail::rel_err(got.M2, target.M2);
      const double e3 = detail::rel_err(got.B, target.B);
      std::printf("mu1 = %s\nmu2 = %s\nmu3 = %s\n", format_double17(u.mu1).c_str(),
                  format_double17(u.mu2).c_str(), format_double17(u.mu3).c_str());
      std::printf("round-trip error = %.3e (M1 %.3e, M2 %.3e, B %.3e)\n",
                  std::max({e1, e2, e3}), e1, e2, e3);
      if (!out_path.empty()) {
        Table t;
        t.columns = {"k", "mu1", "mu2", "mu3", "M1", "M2", "B", "err_M1", "err_M2", "err_B"};
        t.add_row({static_cast<long long>(rk), u.mu1, u.mu2, u.mu3, got.M1, got.M2, got.B, e1,
                   e2, e3});
        write_table(out_path, format, t, meta);
      }
    } else if (*cmd_split) {
      const PseudoHypReport rep = finite_time_splitting(HenonSystem{hp}, to_vec3(x0), transient,
                                                        split_n, window, diverge_at);
      std::printf("window        = %ld\n", rep.window_length);
      std::printf("n_windows     = %ld\n", rep.n_windows);
      std::printf("sigma_est     = %s\n", format_double17(rep.sigma_est).c_str());
      std::printf("nu_est        = %s\n", format_double17(rep.nu_est).c_str());
      std::printf("min_split_gap = %s\n", format_double17(rep.min_split_gap).c_str());
      std::printf("fraction_pass = %s\n", format_double17(rep.fraction_pass).c_str());
      if (!out_path.empty()) {
        Table t;
        t.columns = {"window", "n_windows", "sigma_est", "nu_est", "min_split_gap",
                     "fraction_pass"};
        t.add_row({static_cast<long long>(rep.window_length),
                   static_cast<long long>(rep.n_windows), rep.sigma_est, rep.nu_est,
                   rep.min_split_gap, rep.fraction_pass});
        write_table(out_path, format, t, meta);
      }
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

}  // namespace dlab
