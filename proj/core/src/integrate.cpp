#include "qthermo/integrate.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace qthermo {

namespace {

using State = std::array<double, 3>;

struct BlochRhs {
  const FieldMap& map;
  const std::vector<BathSpec>& baths;
  const Protocol& protocol;
  const KernelOptions& kopts;

  void operator()(const State& y, State& dydt, double t) const {
    const double s = protocol.s_at_time(t);
    const Kernel k = build_kernel(map, baths, protocol.point(s), kopts);
    const Vec3 r(y[0], y[1], y[2]);
    const Vec3 d = k.A() * r - k.gtot();
    dydt = {d[0], d[1], d[2]};
  }
};

double dist(const State& a, const State& b) {
  return std::sqrt((a[0] - b[0]) * (a[0] - b[0]) + (a[1] - b[1]) * (a[1] - b[1]) +
                   (a[2] - b[2]) * (a[2] - b[2]));
}

}  // namespace

Trajectory integrate_full(const FieldMap& map, const std::vector<BathSpec>& baths,
                          const Protocol& protocol, const Vec3& r0_lab,
                          const IntegrateOptions& opts) {
  namespace ode = boost::numeric::odeint;
  using Stepper = ode::runge_kutta_dopri5<State>;

  BlochRhs rhs{map, baths, protocol, opts.kernel};
  const double tau = protocol.duration();

  auto run_cycle = [&](State y, auto&& observer) {
    auto stepper = ode::make_dense_output(opts.abs_tol, opts.rel_tol, Stepper());
    stepper.initialize(y, 0.0, tau / 1024.0);
    long steps = 0;
    while (stepper.current_time() < tau) {
      if (++steps > opts.max_steps_per_cycle)
        throw NoConvergence("integrate_full: step budget exhausted (stiff dynamics?)");
      stepper.do_step(rhs);
      observer(stepper);
    }
    State out;
    stepper.calc_state(tau, out);
    return out;
  };

  State y = {r0_lab[0], r0_lab[1], r0_lab[2]};
  double residual = 0.0;
  int cycle = 0;
  const int cycles = protocol.closed() ? opts.max_cycles : 1;
  for (cycle = 1; cycle <= cycles; ++cycle) {
    const State y_in = y;
    y = run_cycle(y, [](auto&) {});
    residual = dist(y, y_in);
    if (protocol.closed() && residual < opts.period_tol) break;
  }
  if (protocol.closed() && residual >= opts.period_tol)
    throw NoConvergence("integrate_full: no periodic steady state after " +
                        std::to_string(opts.max_cycles) + " cycles");

  // final measured pass with dense sampling
  Trajectory traj;
  const int n = opts.samples_per_cycle;
  traj.t.reserve(n + 1);
  traj.state_lab.reserve(n + 1);
  traj.currents.reserve(n + 1);

  auto emit = [&](double t, const State& ys) {
    const double s = protocol.s_at_time(t);
    const VecX X = protocol.point(s);
    const Kernel k = build_kernel(map, baths, X, opts.kernel);
    const Vec3 r(ys[0], ys[1], ys[2]);
    traj.t.push_back(t);
    traj.state_lab.push_back(r);

    CurrentSample cs;
    cs.t = t;
    cs.J = energy_current_lab(k, r, StateOrder::Frozen);
    Vec3 rf = Vec3::Zero();
    try {
      rf = frozen_steady_state_lab(k, opts.kernel);
    } catch (const SingularKernel&) {
      // decoupled limit: no frozen reference, all power is counted as
      // non-conservative
    }
    const auto F = map.field_jacobian(X);
    const double dsdt = 1.0 / (tau * protocol.speed(s));
    const VecX Xdot = protocol.tangent(s) * dsdt;
    double P = 0.0, Pc = 0.0;
    for (int l = 0; l < X.size(); ++l) {
      P += -F.col(l).dot(r) * Xdot[l];
      Pc += -F.col(l).dot(rf) * Xdot[l];
    }
    cs.P_cons = Pc;
    cs.P_noncons = P - Pc;
    traj.currents.push_back(cs);
  };

  auto stepper = ode::make_dense_output(opts.abs_tol, opts.rel_tol, Stepper());
  stepper.initialize(y, 0.0, tau / 1024.0);
  emit(0.0, y);
  long steps = 0;
  for (int i = 1; i <= n; ++i) {
    const double tq = tau * static_cast<double>(i) / n;
    while (stepper.current_time() < tq) {
      if (++steps > opts.max_steps_per_cycle)
        throw NoConvergence("integrate_full: step budget exhausted (stiff dynamics?)");
      stepper.do_step(rhs);
    }
    State ys;
    stepper.calc_state(tq, ys);
    emit(tq, ys);
  }

  traj.cycles_run = cycle;
  traj.periodic_converged = protocol.closed() && residual < opts.period_tol;
  traj.cycle_residual = residual;
  return traj;
}

}  // namespace qthermo
