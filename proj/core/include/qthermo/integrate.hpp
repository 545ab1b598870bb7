// Full time integration of the driven Bloch equation, used as the validation
// oracle for the adiabatic expansion and for periodic steady states.

#pragma once

#include <vector>

#include "qthermo/kernel.hpp"
#include "qthermo/protocol.hpp"

namespace qthermo {

struct CurrentSample {
  double t = 0.0;
  std::vector<double> J;    // per-bath energy flux
  double P_cons = 0.0;      // power against the frozen (quasi-static) state
  double P_noncons = 0.0;   // remainder
};

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec3> state_lab;
  std::vector<CurrentSample> currents;
  int cycles_run = 0;
  bool periodic_converged = false;
  double cycle_residual = 0.0;  // |r(0) - r(tau)| of the last cycle
};

struct IntegrateOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_cycles = 1000;
  int samples_per_cycle = 512;
  double period_tol = 1e-10;
  long max_steps_per_cycle = 20000000;  // stiffness guard
  KernelOptions kernel;
};

// Integrates dr/dt = (E + sum M_a) r - sum g_a along the protocol starting
// from r0 (lab frame). Closed protocols are iterated cycle by cycle until the
// cycle-to-cycle distance drops below period_tol (NoConvergence after
// max_cycles); open protocols run once. The returned samples cover the final
// cycle.
Trajectory integrate_full(const FieldMap& map, const std::vector<BathSpec>& baths,
                          const Protocol& protocol, const Vec3& r0_lab,
                          const IntegrateOptions& opts = {});

}  // namespace qthermo
