// Steady-state heat transport through the static qubit: per-bath currents,
// Landauer-Buttiker integrals, linear conductance, rectification.

#pragma once

#include <functional>

#include "qthermo/kernel.hpp"
#include "qthermo/quadrature.hpp"

namespace qthermo {

struct TransportPoint {
  double T = 0.0;   // mean temperature
  double dT = 0.0;  // T_l - T_r
  double J_l = 0.0, J_r = 0.0;  // energy flux into each bath
};

// Frozen master equation with per-bath temperatures; currents from the
// steady state. J_l + J_r = 0 holds identically for the two-terminal kernel.
TransportPoint steady_current(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                              const BathSpec& bath_r, const KernelOptions& opts = {});

struct LandauerOptions {
  double eps_max = -1.0;  // integration cutoff; default 60*max(T_h,T_c)
  QuadratureOptions quad{1e-12, 1e-8, 16, 8192};
};

// J = int_0^inf deps eps T(eps) [n_h(eps) - n_c(eps)]; the integrand is
// regular at eps = 0 (the Bose poles cancel in the difference) but the
// integral is split there anyway.
double landauer_current(const std::function<double(double)>& transmission, double T_h,
                        double T_c, const LandauerOptions& opts = {});

struct Conductance {
  double G_th = 0.0;
  double G_over_GQ = 0.0;  // ratio to the quantum pi^2 T / 3
};

// Symmetric difference quotient dJ_r/d(dT) at dT = 0 with step 1e-4*T.
Conductance thermal_conductance(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                                const BathSpec& bath_r, double T, double rel_step = 1e-4,
                                const KernelOptions& opts = {});

// R = [J(dT) + J(-dT)] / [J(dT) - J(-dT)], J the cold-side (right) current
// with T_{l,r} = T +- dT/2. ZeroCurrent when the denominator underflows.
double rectification(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                     const BathSpec& bath_r, double T, double dT,
                     const KernelOptions& opts = {});

// Effective rate asymmetry lambda = (G_l - G_r)/(G_l + G_r) at the operating
// point (weak-coupling rectification bound: |R| <= lambda * dT / (2T)).
double rate_asymmetry(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                      const BathSpec& bath_r, double T, const KernelOptions& opts = {});

}  // namespace qthermo
