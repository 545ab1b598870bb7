// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// criterion fails. Every tolerance is pinned here, in code.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qthermo/geometry.hpp"
#include "qthermo/integrate.hpp"
#include "qthermo/machines.hpp"
#include "qthermo/pumping.hpp"
#include "qthermo/transport.hpp"

using namespace qthermo;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int idx, const char* name, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", idx, name, detail.c_str());
  if (!pass) ++g_failures;
}

std::vector<BathSpec> planar_baths(double gl, double gr, double T) {
  BathSpec bl, br;
  bl.label = "l";
  bl.axis = Vec3(0, 0, 1);
  bl.strength = gl;
  bl.temperature = T;
  br.label = "r";
  br.axis = Vec3(1, 0, 0);
  br.strength = gr;
  br.temperature = T;
  return {bl, br};
}

Protocol ellipse(double cx, double cz, double a, double b, double tau) {
  return Protocol::from_closure(
      2,
      [=](double s) {
        VecX X(2);
        X << cx + a * std::cos(2 * M_PI * s), cz + b * std::sin(2 * M_PI * s);
        return X;
      },
      tau, true,
      [=](double s) {
        VecX d(2);
        d << -2 * M_PI * a * std::sin(2 * M_PI * s), 2 * M_PI * b * std::cos(2 * M_PI * s);
        return d;
      });
}

// quarter-plane loop with dyadic segment boundaries (s = 1/4, 3/4) so that
// panel-doubling quadrature lands on the kinks
Protocol quarter_plane(double R, double eps, double tau) {
  return Protocol::from_closure(
      2,
      [=](double s) {
        VecX X(2);
        if (s < 0.25) {
          X << eps, eps + (R - eps) * 4.0 * s;
        } else if (s < 0.75) {
          const double th = (s - 0.25) * 2.0 * M_PI / 2;  // 0..pi/2 over half the loop
          X << eps + (R - eps) * std::sin(th), eps + (R - eps) * std::cos(th);
        } else {
          X << eps + (R - eps) * 4.0 * (1.0 - s), eps;
        }
        return X;
      },
      tau, true);
}

// ---------------------------------------------------------------- criteria --

void criterion_1() {
  const FieldMap map = FieldMap::planar_xz();
  double worst = 0.0;
  for (double bB : {0.1, 1.0, 10.0}) {
    const double T = 0.8;
    VecX X(2);
    X << 0.0, bB * T;
    BathSpec b;
    b.axis = Vec3(1, 0, 0);  // transverse to the field
    b.strength = 0.03;
    b.temperature = T;
    const Vec3 rf = frozen_steady_state(build_kernel(map, {b}, X));
    worst = std::max(worst, std::abs(rf[2] - std::tanh(bB)));
    worst = std::max(worst, std::abs(rf[0]));
    worst = std::max(worst, std::abs(rf[1]));
  }
  char d[64];
  std::snprintf(d, sizeof d, "max dev %.2e, tol 1e-12", worst);
  report(1, "Gibbs fixed point", worst < 1e-12, d);
}

void criterion_2() {
  const FieldMap map = FieldMap::spherical();
  const double T = 1.0, g0 = 0.05;
  BathSpec bath;
  bath.coupling = CouplingKind::Thermalization;
  bath.strength = g0;
  bath.temperature = T;
  GeoOptions opts;
  opts.mode = ResponseMode::Dissipative;  // the printed closed-form route

  // global convention factor measured on the first grid point, then required
  // to be constant (1e-8) with entries matched to 1e-6 relative
  double factor = 0.0;
  double worst_entry = 0.0, worst_factor = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double bB = 0.1 * std::pow(100.0, i / 19.0);  // log grid over [0.1, 10]
    for (int j = 0; j < 20; ++j) {
      const double th = 0.15 + (M_PI - 0.3) * j / 19.0;
      VecX X(3);
      X << bB * T, th, 0.4;
      const GeoTensor g = geo_tensor(map, {bath}, X, opts);
      const double B = bB * T;
      const double GammaB = g0 * B;
      const double lamB = std::sinh(bB) / (GammaB * std::pow(std::cosh(bB), 3));
      const double lamq = std::pow(std::tanh(bB), 2) / GammaB;
      const double tgt[3] = {lamB / T, B * lamq, B * lamq * std::sin(th) * std::sin(th)};
      const double got[3] = {g.lambda(0, 0), g.lambda(1, 1), g.lambda(2, 2)};
      for (int e = 0; e < 3; ++e) {
        const double r = got[e] / tgt[e];
        if (factor == 0.0) factor = r;
        worst_factor = std::max(worst_factor, std::abs(r - factor));
        worst_entry = std::max(worst_entry, std::abs(got[e] - factor * tgt[e]) /
                                                std::abs(factor * tgt[e]));
      }
    }
  }
  char d[160];
  std::snprintf(d, sizeof d, "factor %.9f, entry dev %.2e (tol 1e-6), factor dev %.2e (tol 1e-8)",
                factor, worst_entry, worst_factor);
  report(2, "analytic metric oracle", worst_entry < 1e-6 && worst_factor < 1e-8, d);
}

void criterion_3() {
  const FieldMap sph = FieldMap::spherical();
  double worst = 0.0;
  for (int i = 1; i < 40; ++i) {
    const double th = M_PI * i / 40.0;
    VecX X(3);
    X << 1.3, th, 1.1;
    worst = std::max(worst, std::abs(berry_curvature(sph, X) - 0.5 * std::sin(th)));
  }
  // sphere integral: (1/2pi) int Omega dth dphi = 1
  double C = 0.0;
  const int nth = 2000;
  for (int i = 0; i < nth; ++i) {
    const double th = M_PI * (i + 0.5) / nth;
    VecX X(3);
    X << 1.0, th, 0.0;
    C += berry_curvature(sph, X) * (M_PI / nth) * (2 * M_PI) / (2 * M_PI);
  }
  char d[96];
  std::snprintf(d, sizeof d, "curvature dev %.2e (tol 1e-8), C = %.8f (tol 1e-6)", worst, C);
  report(3, "spherical Berry curvature", worst < 1e-8 && std::abs(C - 1.0) < 1e-6, d);
}

void criterion_4() {
  const auto trivial = chern_number(FieldMap::synthetic_lattice(1.0, +0.5), 200);
  const auto topo = chern_number(FieldMap::synthetic_lattice(1.0, -0.5), 200);
  const auto dirac = chern_number(FieldMap::synthetic_lattice(1.0, 0.0), 200);
  const bool pass = std::abs(trivial.C) < 1e-9 && std::abs(topo.C - 1.0) < 1e-9 &&
                    dirac.dirac_flag && std::abs(dirac.C - 0.5) < 1e-2;
  char d[128];
  std::snprintf(d, sizeof d, "C(+.5)=%.2e C(-.5)=1%+.2e C(0)=%.4f dirac=%d", trivial.C,
                topo.C - 1.0, dirac.C, static_cast<int>(dirac.dirac_flag));
  report(4, "Chern quantization on the 200x200 sBz", pass, d);
}

void criterion_5() {
  const FieldMap map = FieldMap::planar_xz();
  const double T = 1.0;
  const auto baths = planar_baths(0.02, 0.02, T);
  const PumpField field = make_pump_field(map, baths);
  PumpedHeatOptions po;
  po.stokes_check = false;
  po.quad.doubling_tol = 1e-7;

  const double ceiling = T * std::log(2.0);
  double prev = 0.0;
  bool monotone = true, bounded = true;
  double final_ratio = 0.0;
  for (double R : {2.0, 4.0, 8.0, 16.0}) {
    const double Q = pumped_heat(quarter_plane(R, 1e-4, 50.0), field, po).Q;
    monotone = monotone && (Q > prev);
    bounded = bounded && (Q <= ceiling * (1.0 + 1e-3));
    prev = Q;
    final_ratio = Q / ceiling;
  }
  char d[96];
  std::snprintf(d, sizeof d, "Q/Tln2 -> %.6f (within 1%%), monotone=%d, bounded=%d", final_ratio,
                monotone, bounded);
  report(5, "Landauer pumping limit", monotone && bounded && std::abs(final_ratio - 1.0) < 0.01,
         d);
}

void criterion_6() {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths(0.04, 0.04, 1.0);
  const TensorField field = make_tensor_field(map, baths);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool holds = true, saturates = true;
  double worst_gap = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double cx = 0.8 + 0.8 * u(rng), cz = 0.8 + 0.8 * u(rng);
    const double a = 0.1 + 0.4 * u(rng), b = 0.1 + 0.4 * u(rng);
    const double skew = 0.8 * (2 * u(rng) - 1);
    const auto p = ellipse(cx, cz, a, b, 60.0).with_speed([skew](double s) {
      return 1.0 + skew * std::sin(2 * M_PI * s) + 0.2 * skew * std::cos(4 * M_PI * s);
    });
    const auto chk = dissipation_bound_check(p, field);
    holds = holds && (chk.TSigma >= chk.bound * (1.0 - 1e-9));
    const auto popt = constant_rate_reparametrize(p, field);
    const auto chk2 = dissipation_bound_check(popt, field, 1e-6);
    saturates = saturates && chk2.saturated;
    worst_gap = std::max(worst_gap,
                         std::abs(chk2.TSigma - chk2.bound) / std::max(chk2.TSigma, chk2.bound));
  }
  char d[96];
  std::snprintf(d, sizeof d, "bound holds on 100 draws=%d, reparam gap %.2e (tol 1e-6)", holds,
                worst_gap);
  report(6, "dissipation bound and saturation", holds && saturates, d);
}

void criterion_7() {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths(0.05, 0.05, 1.0);
  auto residual = [&](double tau) {
    const auto p = ellipse(1.0, 1.0, 0.3, 0.22, tau);
    const Vec3 r0 = frozen_steady_state_lab(build_kernel(map, baths, p.point(0.0)));
    const auto t = integrate_full(map, baths, p, r0);
    double worst = 0.0;
    for (size_t i = 0; i < t.t.size(); ++i) {
      const double s = p.s_at_time(t.t[i]);
      const VecX X = p.point(s);
      const Kernel k = build_kernel(map, baths, X);
      const MatX J = frozen_jacobian_lab(map, baths, X);
      const VecX xdot = p.tangent(s) / (tau * p.speed(s));
      const Vec3 pred = frozen_steady_state_lab(k) + adiabatic_correction_lab(k, J, xdot);
      worst = std::max(worst, (t.state_lab[i] - pred).norm());
    }
    return worst;
  };
  const double e1 = residual(1500.0), e2 = residual(3000.0);
  const double ratio = e1 / e2;
  char d[64];
  std::snprintf(d, sizeof d, "residual ratio %.3f, window [3.5, 4.5]", ratio);
  report(7, "adiabatic-expansion convergence", ratio >= 3.5 && ratio <= 4.5, d);
}

void criterion_8() {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths(0.02, 0.02, 1.0);
  const double x = 0.05;
  MachineSummary s = machine_summary(ellipse(1.0, 1.0, 0.5, 0.35, 500.0), map, baths, x);
  if (s.A < 0.0) s = machine_summary(ellipse(1.0, 1.0, -0.5, 0.35, 500.0), map, baths, x);
  const auto p = engine_performance(s);

  const double P_at_2tauD = engine_power_at(p, s.A, x, p.tau_P);
  const double target = 0.25 * x * x * s.A * s.A / s.L2;
  const double dev_P = std::abs(P_at_2tauD - target) / target;

  const double h = p.tau_eta * 1e-5;
  const double deta =
      (engine_eta_at(p, p.tau_eta + h) - engine_eta_at(p, p.tau_eta - h)) / (2 * h);
  const double eta_scale = p.eta_C / p.tau_D;
  const bool pass = dev_P < 1e-8 && std::abs(deta) < 1e-6 * eta_scale;
  char d[96];
  std::snprintf(d, sizeof d, "P(2tauD) dev %.2e (tol 1e-8), deta/dtau %.2e of scale (tol 1e-6)",
                dev_P, std::abs(deta) / eta_scale);
  report(8, "machine optimum identities", pass, d);
}

void criterion_9() {
  const double Sc = 0.9, Sh = 1.2, dS = 0.6, Tc = 1.0, Th = 1.4;
  const auto o = optimal_strokes(Sc, Sh, dS, Tc, Th);
  auto P = [&](double tc, double th) {
    return (dS * (Th - Tc) - Tc * Sc / tc - Th * Sh / th) / (tc + th);
  };
  const double P0 = P(o.tau_c, o.tau_h);
  double best = P0;
  for (int i = 0; i < 50; ++i)
    for (int j = 0; j < 50; ++j)
      best = std::max(best, P(o.tau_c * (0.98 + 0.04 * i / 49.0),
                              o.tau_h * (0.98 + 0.04 * j / 49.0)));
  const double dev = (best - P0) / P0;
  char d[96];
  std::snprintf(d, sizeof d, "grid excess %.2e (tol 1e-6), P_max dev %.2e", dev,
                std::abs(P0 - o.P_max) / o.P_max);
  report(9, "finite-time Carnot stroke optimum", dev < 1e-6 && std::abs(P0 - o.P_max) / o.P_max < 1e-10,
         d);
}

void criterion_10() {
  const double w1 = 0.005;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  const double horizon = 2.0 * M_PI / w1 * 1200.0;
  FloquetOptions fo;
  fo.drift_tol = 0.01;
  fo.rel_tol = 1e-9;
  fo.phase_grid = {{0.0, 0.0}, {0.8, 2.1}, {1.6, 4.2}, {2.4, 0.1},
                   {3.2, 2.2}, {4.0, 4.3}, {4.8, 0.2}, {5.6, 2.3}};
  const auto topo = floquet_pump(FieldMap::synthetic_lattice(1.0, -0.5), w1, golden * w1,
                                 horizon, fo);
  const auto triv = floquet_pump(FieldMap::synthetic_lattice(1.0, +0.5), w1, golden * w1,
                                 horizon, fo);
  const bool pass = std::abs(topo.ratio - 1.0) < 0.05 && topo.horizon_ok &&
                    std::abs(triv.ratio) < 0.05;
  char d[96];
  std::snprintf(d, sizeof d, "ratio(-0.5)=%.4f (drift ok=%d), ratio(+0.5)=%.4f", topo.ratio,
                topo.horizon_ok, triv.ratio);
  report(10, "Floquet topological pumping", pass, d);
}

void criterion_11() {
  const FieldMap map = FieldMap::planar_xz();
  const double T = 1.0;
  bool conserve = true;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.3, 1.6);
  BathSpec bl, br;
  bl.axis = Vec3(0, 0, 1);
  br.axis = Vec3(1, 0, 0);
  for (int i = 0; i < 200; ++i) {
    VecX X(2);
    X << u(rng), u(rng);
    bl.strength = 0.02 * u(rng);
    br.strength = 0.02 * u(rng);
    bl.temperature = u(rng);
    br.temperature = u(rng);
    const auto p = steady_current(map, X, bl, br);
    const double scale = std::max({std::abs(p.J_l), std::abs(p.J_r), 1e-300});
    conserve = conserve && std::abs(p.J_l + p.J_r) <= 1e-10 * scale;
  }

  bl.strength = br.strength = 0.02;
  bl.temperature = br.temperature = T;
  VecX Xm(2);
  Xm << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const double Rm = rectification(map, Xm, bl, br, T, 0.3);

  VecX Xa(2);
  Xa << 0.6, 0.8;
  BathSpec al = bl, ar = br;
  al.strength = 0.03;
  ar.strength = 0.01;
  const double dT = 0.4;
  const double Ra = rectification(map, Xa, al, ar, T, dT);
  const double lam = std::abs(rate_asymmetry(map, Xa, al, ar, T));
  const bool bound_ok = std::abs(Ra) <= lam * dT / (2.0 * T) * (1.0 + 1e-2);
  char d[128];
  std::snprintf(d, sizeof d, "conservation=%d, |R_sym|=%.1e (tol 1e-10), |R|=%.3e <= %.3e", conserve,
                std::abs(Rm), std::abs(Ra), lam * dT / (2.0 * T) * (1.0 + 1e-2));
  report(11, "transport conservation, symmetry, bound", conserve && std::abs(Rm) < 1e-10 && bound_ok,
         d);
}

void criterion_12() {
  const FieldMap map = FieldMap::planar_xz();
  const auto baths = planar_baths(0.04, 0.04, 1.0);
  GeoOptions opts;
  opts.bias = true;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.2, 1.8);
  // relative to the characteristic row/column magnitude of the sample: the
  // entries themselves cross zero at the equal-relaxation-share angle
  double worst_abs = 0.0, scale = 0.0;
  for (int i = 0; i < 1000; ++i) {
    VecX X(2);
    X << u(rng), u(rng);
    const GeoTensor g = geo_tensor(map, baths, X, opts);
    for (int l = 0; l < 2; ++l) {
      const double row = g.lambda(2, l), col = g.lambda(l, 2);
      worst_abs = std::max(worst_abs, std::abs(row + col));
      scale = std::max({scale, std::abs(row), std::abs(col)});
    }
  }
  const double worst = worst_abs / scale;
  char d[64];
  std::snprintf(d, sizeof d, "max asymmetry defect %.2e of scale %.2e (tol 1e-8)", worst, scale);
  report(12, "Onsager bias row/column antisymmetry", worst < 1e-8, d);
}

void criterion_13() {
  const fs::path dir = fs::temp_directory_path() / "qthermo_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path cfg = dir / "pump.json";
  {
    std::ofstream os(cfg);
    os << R"({
      "command": "pump",
      "field_map": {"kind": "planar-xz"},
      "baths": [
        {"label": "l", "axis": [0,0,1], "strength": 0.02, "temperature_energy": 1.0},
        {"label": "r", "axis": [1,0,0], "strength": 0.02, "temperature_energy": 1.0}
      ],
      "protocol": {"kind": "ellipse", "center": [1.0, 1.0], "radii": [0.5, 0.35],
                   "duration_time": 80.0, "closed": true},
      "seed": 11
    })";
  }
  auto run = [&](const fs::path& out) {
    const std::string cmd = std::string(QTHERMO_CLI_PATH) + " run " + cfg.string() +
                            " --out-dir " + out.string() + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  const int c1 = run(dir / "a"), c2 = run(dir / "b");
  auto slurp = [](const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
  };
  const std::string f1 = slurp(dir / "a" / "pump.csv"), f2 = slurp(dir / "b" / "pump.csv");
  const bool pass = c1 == 0 && c2 == 0 && !f1.empty() && f1 == f2;
  char d[64];
  std::snprintf(d, sizeof d, "exit codes %d/%d, byte-identical=%d", c1, c2, int(f1 == f2));
  report(13, "CLI reproducibility", pass, d);
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  std::printf("%d/13 criteria passed\n", 13 - g_failures);
  return g_failures == 0 ? 0 : 1;
}
