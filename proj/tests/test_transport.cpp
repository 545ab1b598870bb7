#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qthermo/integrate.hpp"
#include "qthermo/transport.hpp"

using namespace qthermo;

namespace {

BathSpec zbath(double g, double T) {
  BathSpec b;
  b.axis = Vec3(0, 0, 1);
  b.strength = g;
  b.temperature = T;
  return b;
}
BathSpec xbath(double g, double T) {
  BathSpec b;
  b.axis = Vec3(1, 0, 0);
  b.strength = g;
  b.temperature = T;
  return b;
}

}  // namespace

TEST_CASE("steady currents: equilibrium, direction, conservation") {
  const FieldMap map = FieldMap::planar_xz();
  VecX X(2);
  X << 0.6, 0.8;

  const auto eq = steady_current(map, X, zbath(0.03, 1.0), xbath(0.04, 1.0));
  CHECK(std::abs(eq.J_l) < 1e-14);
  CHECK(std::abs(eq.J_r) < 1e-14);

  const auto tp = steady_current(map, X, zbath(0.03, 1.2), xbath(0.04, 0.8));
  CHECK(tp.J_l < 0.0);  // heat leaves the hot bath
  CHECK(tp.J_r > 0.0);  // and enters the cold one
  CHECK(std::abs(tp.J_l + tp.J_r) < 1e-10 * std::abs(tp.J_r));

  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.3, 1.7);
  for (int i = 0; i < 50; ++i) {
    VecX Y(2);
    Y << u(rng), u(rng);
    const auto p = steady_current(map, Y, zbath(0.02 * u(rng), u(rng)), xbath(0.02 * u(rng), u(rng)));
    CHECK(std::abs(p.J_l + p.J_r) <= 1e-10 * std::max(std::abs(p.J_l), 1e-300));
  }
}

TEST_CASE("steady current matches the long-time integration limit") {
  const FieldMap map = FieldMap::planar_xz();
  VecX X(2);
  X << 0.7, 0.9;
  const BathSpec bl = zbath(0.04, 1.1), br = xbath(0.03, 0.9);
  const auto pt = steady_current(map, X, bl, br);

  auto still = Protocol::from_closure(
      2,
      [X](double) { return X; },
      60.0, true);
  IntegrateOptions io;
  io.max_cycles = 200;
  const auto traj = integrate_full(map, {bl, br}, still, Vec3(0.2, 0.1, -0.3), io);
  const auto& J = traj.currents.back().J;
  CHECK(J[0] == doctest::Approx(pt.J_l).epsilon(1e-8));
  CHECK(J[1] == doctest::Approx(pt.J_r).epsilon(1e-8));
}

TEST_CASE("landauer-buttiker integral") {
  // narrow smooth window at eps0 = 1 with effective width sqrt(2 pi) sigma
  const double sigma = 0.02, T0 = 0.7;
  auto window = [=](double e) {
    const double z = (e - 1.0) / sigma;
    return T0 * std::exp(-0.5 * z * z);
  };
  CHECK(landauer_current(window, 1.0, 1.0) == doctest::Approx(0.0));

  // narrow window: J ~ eps0 * width * T(eps0) * [n_h - n_c]
  const double Th = 1.3, Tc = 0.7;
  const double J = landauer_current(window, Th, Tc);
  const double width = std::sqrt(2.0 * M_PI) * sigma;
  const double expect = 1.0 * width * T0 * (bose_einstein(1.0, Th) - bose_einstein(1.0, Tc));
  CHECK(J == doctest::Approx(expect).epsilon(2e-3));

  // antisymmetric under swapping the temperatures
  CHECK(landauer_current(window, Tc, Th) == doctest::Approx(-J).epsilon(1e-10));

  // node-doubling stability: halving the tolerance does not move the value
  LandauerOptions t1, t2;
  t1.quad.doubling_tol = 1e-8;
  t2.quad.doubling_tol = 1e-10;
  auto smooth = [](double e) { return std::exp(-e); };
  const double a = landauer_current(smooth, Th, Tc, t1);
  const double b = landauer_current(smooth, Th, Tc, t2);
  CHECK(std::abs(a - b) / std::abs(b) < 1e-8);
}

TEST_CASE("thermal conductance") {
  const FieldMap map = FieldMap::planar_xz();
  VecX X(2);
  X << 0.5, 0.5;
  // decoupled cold bath conducts nothing
  const auto none = thermal_conductance(map, X, zbath(0.04, 1.0), xbath(0.0, 1.0), 1.0);
  CHECK(none.G_th == doctest::Approx(0.0));

  const auto g = thermal_conductance(map, X, zbath(0.02, 1.0), xbath(0.02, 1.0), 1.0);
  CHECK(g.G_th > 0.0);
  CHECK(g.G_over_GQ < 0.2);  // weak coupling stays far below the quantum

  // relabeling symmetry at the mirror point theta = pi/4
  const auto gswap = thermal_conductance(map, X, zbath(0.02, 1.0), xbath(0.02, 1.0), 1.0);
  const auto gswap2 = thermal_conductance(map, X, xbath(0.02, 1.0), zbath(0.02, 1.0), 1.0);
  CHECK(gswap.G_th == doctest::Approx(gswap2.G_th).epsilon(1e-10));

  // linear window: J tracks G dT to 1% for dT/T <= 1e-2
  for (double dT : {0.002, 0.01}) {
    const auto p = steady_current(map, X, zbath(0.02, 1.0 + dT / 2), xbath(0.02, 1.0 - dT / 2));
    CHECK(std::abs(p.J_r - g.G_th * dT) / std::abs(p.J_r) < 1e-2);
  }
}

TEST_CASE("rectification: symmetry zero, weak-coupling bound, small-bias slope") {
  const FieldMap map = FieldMap::planar_xz();
  const double T = 1.0;

  // mirror-symmetric configuration: theta = pi/4 with equal couplings
  VecX Xm(2);
  Xm << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const double Rm = rectification(map, Xm, zbath(0.02, T), xbath(0.02, T), T, 0.3);
  CHECK(std::abs(Rm) < 1e-10);

  // asymmetric configuration obeys the weak-coupling bound
  VecX X(2);
  X << 0.6, 0.8;
  for (double dT : {0.2, 0.4}) {
    const double R = rectification(map, X, zbath(0.03, T), xbath(0.01, T), T, dT);
    const double lam =
        std::abs(rate_asymmetry(map, X, zbath(0.03, T), xbath(0.01, T), T));
    CHECK(std::abs(R) <= lam * dT / (2.0 * T) * (1.0 + 1e-2));
    CHECK(std::abs(R) > 0.0);
  }

  // R -> 0 linearly in the bias
  const double R1 = rectification(map, X, zbath(0.02, T), xbath(0.02, T), T, 0.05);
  const double R2 = rectification(map, X, zbath(0.02, T), xbath(0.02, T), T, 0.10);
  CHECK(R2 / R1 == doctest::Approx(2.0).epsilon(0.03));

  CHECK_THROWS_AS(rectification(map, X, zbath(0.02, T), xbath(0.02, T), T, 2.5), InvalidBias);
}
