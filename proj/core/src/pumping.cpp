#include "qthermo/pumping.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <numeric>

namespace qthermo {

PumpField make_pump_field(const FieldMap& map, std::vector<BathSpec> baths,
                          const GeoOptions& opts_in) {
  GeoOptions opts = opts_in;
  opts.bias = true;
  return [map, baths = std::move(baths), opts](const VecX& X) {
    const GeoTensor g = geo_tensor(map, baths, X, opts);
    return VecX(g.lambda.row(g.N).head(g.N));
  };
}

PumpedHeat pumped_heat(const Protocol& protocol, const PumpField& field,
                       const PumpedHeatOptions& opts) {
  if (!protocol.closed()) throw OpenProtocol("pumped_heat needs a closed protocol");
  PumpedHeat out;
  out.Q = integrate(
      [&](double s) {
        const VecX X = protocol.point(s);
        return field(X).dot(protocol.tangent(s));
      },
      0.0, 1.0, opts.quad);

  if (!opts.stokes_check) return out;
  const int dim = static_cast<int>(protocol.point(0.0).size());
  if (dim != 2) return out;

  // centroid of the curve
  VecX C = VecX::Zero(2);
  const int na = opts.stokes_angular, nr = opts.stokes_radial;
  for (int i = 0; i < na; ++i) C += protocol.point(static_cast<double>(i) / na);
  C /= na;

  auto curl = [&](const VecX& X) {
    const double h = opts.curl_step * std::max(1.0, X.cwiseAbs().maxCoeff());
    VecX Xp = X, Xm = X;
    Xp[0] += h; Xm[0] -= h;
    const double d1 = (field(Xp)[1] - field(Xm)[1]) / (2 * h);
    Xp = X; Xm = X;
    Xp[1] += h; Xm[1] -= h;
    const double d2 = (field(Xp)[0] - field(Xm)[0]) / (2 * h);
    return d1 - d2;  // d Lambda_2/dX_1 - d Lambda_1/dX_2
  };

  // star-shaped sweep P(r,s) = C + r (X(s) - C)
  double flux = 0.0;
  for (int i = 0; i < nr; ++i) {
    const double r = (i + 0.5) / nr;
    double ring = 0.0;
    for (int j = 0; j < na; ++j) {
      const double s = (j + 0.5) / na;
      const VecX Xs = protocol.point(s);
      const VecX dXs = protocol.tangent(s);
      const VecX rad = Xs - C;
      const double jac = r * (rad[0] * dXs[1] - rad[1] * dXs[0]);
      VecX P = C + r * rad;
      ring += curl(P) * jac;
    }
    flux += ring / na;
  }
  flux /= nr;
  out.stokes = flux;
  out.stokes_residual = std::abs(out.Q - flux) / std::max(std::abs(out.Q), 1e-300);
  out.stokes_checked = true;
  return out;
}

std::vector<double> power_pump(const std::vector<double>& P_l, const std::vector<double>& P_lp) {
  if (P_l.size() != P_lp.size()) throw ConfigError("power_pump: sample lengths differ");
  std::vector<double> out(P_l.size());
  for (size_t i = 0; i < P_l.size(); ++i) out[i] = 0.5 * (P_l[i] - P_lp[i]);
  return out;
}

double power_pump_adiabatic(const GeoTensor& g, const VecX& Xdot, int l, int lp) {
  const MatX A = g.antisym();
  return Xdot[l] * A(l, lp) * Xdot[lp];
}

namespace {

std::pair<int, int> curvature_pair(const FieldMap& map) {
  // orientations chosen so the ground band of the spherical map carries
  // +sin(theta)/2 and the plaquette sum over the sBz equals chern_number
  if (map.kind() == FieldMap::Kind::Spherical) return {1, 2};  // (theta, phi)
  if (map.dim() == 2) return {1, 0};                           // (X2, X1)
  throw ConfigError("berry_curvature: no curvature pair for this map");
}

}  // namespace

double berry_curvature(const FieldMap& map, const VecX& X, Band band, double gap_tol) {
  const auto [a, b] = curvature_pair(map);
  const Vec3 B = map.field(X);
  const double mag = B.norm();
  if (2.0 * mag < gap_tol) throw GapClosure("band gap below tolerance at this point");
  const Vec3 n = B / mag;
  const auto J = map.field_jacobian(X);
  const Vec3 dna = (J.col(a) - n * n.dot(J.col(a))) / mag;
  const Vec3 dnb = (J.col(b) - n * n.dot(J.col(b))) / mag;
  const double omega = 0.5 * n.dot(dna.cross(dnb));
  return band == Band::Ground ? omega : -omega;
}

namespace {

Eigen::Vector2cd ground_spinor(const Vec3& Bvec) {
  const double mag = Bvec.norm();
  const Vec3 n = Bvec / mag;
  const double th = std::acos(std::clamp(n.z(), -1.0, 1.0));
  const double ph = std::atan2(n.y(), n.x());
  Eigen::Vector2cd v;
  v << std::cos(0.5 * th),
      std::exp(std::complex<double>(0.0, ph)) * std::sin(0.5 * th);
  return v;
}

}  // namespace

namespace {

struct PlaquetteSum {
  double C = 0.0;
  int excluded = 0;
};

}  // namespace

ChernResult chern_number(const FieldMap& map, int resolution, Band band, double gap_tol,
                         double exclusion_radius) {
  if (!map.periodic()) throw ConfigError("chern_number needs the periodic lattice map");
  const int N = resolution;
  const double step = 2.0 * M_PI / N;
  if (exclusion_radius < 0.0) exclusion_radius = 0.95 * step;

  ChernResult out;
  std::vector<Eigen::Vector2cd> states(static_cast<size_t>(N) * N);
  std::vector<bool> gapped(static_cast<size_t>(N) * N, true);
  std::vector<VecX> pts(static_cast<size_t>(N) * N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      VecX X(2);
      X << -M_PI + i * step, -M_PI + j * step;
      const Vec3 B = map.field(X);
      const size_t id = static_cast<size_t>(i) * N + j;
      pts[id] = X;
      if (2.0 * B.norm() < gap_tol) {
        gapped[id] = false;
        out.closures.emplace_back(i, j);
        out.dirac_flag = true;
        continue;
      }
      Eigen::Vector2cd v = ground_spinor(B);
      if (band == Band::Excited) {
        Eigen::Vector2cd e;
        e << -std::conj(v[1]), std::conj(v[0]);
        v = e;
      }
      states[id] = v;
    }
  }

  // exclusion disks around every closure (torus metric)
  auto excluded = [&](int i, int j, double radius) {
    if (!gapped[static_cast<size_t>(i) * N + j]) return true;
    for (const auto& [ci, cj] : out.closures) {
      double dx = std::abs(pts[static_cast<size_t>(i) * N + j][0] - pts[static_cast<size_t>(ci) * N + cj][0]);
      double dy = std::abs(pts[static_cast<size_t>(i) * N + j][1] - pts[static_cast<size_t>(ci) * N + cj][1]);
      dx = std::min(dx, 2.0 * M_PI - dx);
      dy = std::min(dy, 2.0 * M_PI - dy);
      if (dx * dx + dy * dy < radius * radius) return true;
    }
    return false;
  };

  auto plaquette_sum = [&](double radius) {
    PlaquetteSum ps;
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        const int ip = (i + 1) % N, jp = (j + 1) % N;
        if (!out.closures.empty() && (excluded(i, j, radius) || excluded(ip, j, radius) ||
                                      excluded(i, jp, radius) || excluded(ip, jp, radius))) {
          ++ps.excluded;
          continue;
        }
        const auto& u00 = states[static_cast<size_t>(i) * N + j];
        const auto& u01 = states[static_cast<size_t>(i) * N + jp];
        const auto& u11 = states[static_cast<size_t>(ip) * N + jp];
        const auto& u10 = states[static_cast<size_t>(ip) * N + j];
        // circulation (i,j) -> (i,j+1) -> (i+1,j+1) -> (i+1,j): matches the
        // response-orientation curvature (+1 for the delta < 0 map)
        const std::complex<double> w = u00.dot(u01) * u01.dot(u11) * u11.dot(u10) * u10.dot(u00);
        ps.C += std::arg(w);
      }
    }
    ps.C /= 2.0 * M_PI;
    return ps;
  };

  const PlaquetteSum ps1 = plaquette_sum(exclusion_radius);
  out.excluded_plaquettes = ps1.excluded;
  out.C = ps1.C;
  if (!out.closures.empty()) {
    // principal value: the flux through the excluded disk vanishes linearly
    // with its radius, so Richardson-extrapolate the radius pair (r, 2r)
    const PlaquetteSum ps2 = plaquette_sum(2.0 * exclusion_radius);
    out.C = 2.0 * ps1.C - ps2.C;
  }
  return out;
}

FloquetResult floquet_pump(const FieldMap& map, double w1, double w2, double horizon,
                           const FloquetOptions& opts) {
  namespace ode = boost::numeric::odeint;
  // (Re c0, Im c0, Re c1, Im c1, W): the pumped work rides along in the state,
  // so its integral carries the solver's accuracy instead of sampling noise
  using State = std::array<double, 5>;

  FloquetResult out;
  // commensurability scan over small denominators
  for (int q = 1; q <= 12 && !out.commensurate_warning; ++q) {
    const double pq = w2 / w1 * q;
    if (std::abs(pq - std::round(pq)) < 1e-9) out.commensurate_warning = true;
  }

  const int ntr = opts.trace_points;
  std::vector<double> accum(ntr, 0.0);

  for (const auto& [p1, p2] : opts.phase_grid) {
    auto Bof = [&](double t) {
      VecX X(2);
      X << w1 * t + p1, w2 * t + p2;
      return X;
    };
    auto rhs = [&](const State& y, State& dy, double t) {
      const std::complex<double> c0(y[0], y[1]), c1(y[2], y[3]);
      const VecX X = Bof(t);
      const Vec3 B = map.field(X);
      // H = -B.sigma
      const std::complex<double> h01(-B.x(), B.y());
      const std::complex<double> d0 =
          std::complex<double>(0, -1) * (-B.z() * c0 + h01 * c1);
      const std::complex<double> d1 =
          std::complex<double>(0, -1) * (std::conj(h01) * c0 + B.z() * c1);
      const std::complex<double> off = std::conj(c0) * c1;
      const Vec3 sig(2.0 * off.real(), 2.0 * off.imag(), std::norm(c0) - std::norm(c1));
      const auto J = map.field_jacobian(X);
      const double Pp = 0.5 * (w1 * J.col(0).dot(sig) - w2 * J.col(1).dot(sig));
      dy = {d0.real(), d0.imag(), d1.real(), d1.imag(), Pp};
    };
    const Eigen::Vector2cd psi0 = ground_spinor(map.field(Bof(0.0)));
    State y = {psi0[0].real(), psi0[0].imag(), psi0[1].real(), psi0[1].imag(), 0.0};

    auto stepper = ode::make_dense_output(opts.abs_tol, opts.rel_tol,
                                          ode::runge_kutta_dopri5<State>());
    stepper.initialize(y, 0.0, 0.25 / std::max(1.0, map.field(Bof(0.0)).norm()));

    for (int i = 1; i <= ntr; ++i) {
      const double t = horizon * static_cast<double>(i) / ntr;
      while (stepper.current_time() < t) stepper.do_step(rhs);
      State ys;
      stepper.calc_state(t, ys);
      accum[i - 1] += ys[4] / t;
    }
  }

  const double nph = static_cast<double>(opts.phase_grid.size());
  out.trace.reserve(ntr);
  for (int i = 0; i < ntr; ++i) {
    const double t = horizon * static_cast<double>(i + 1) / ntr;
    out.trace.emplace_back(t, 2.0 * M_PI * accum[i] / nph / (w1 * w2));
  }
  out.ratio = out.trace.back().second;
  out.Pbar = out.ratio * w1 * w2 / (2.0 * M_PI);

  // drift across the last decade of the horizon
  double lo = out.ratio, hi = out.ratio;
  for (const auto& [t, r] : out.trace) {
    if (t >= 0.1 * horizon) {
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  const double drift = (hi - lo) / std::max(std::abs(out.ratio), 1e-12);
  out.horizon_ok = drift < opts.drift_tol;
  if (!out.horizon_ok && opts.require_converged)
    throw HorizonTooShort("running pump average drifts " + std::to_string(drift) +
                          " over the last decade");
  return out;
}

}  // namespace qthermo
