// Thermal-machine analysis: Carnot bookkeeping, finite-time stroke
// optimization, adiabatic-machine observables and performance, operation-mode
// classification, and isoperimetric protocol optimization.

#pragma once

#include <cstdint>
#include <vector>

#include "qthermo/geometry.hpp"
#include "qthermo/pumping.hpp"

namespace qthermo {

struct CarnotReference {
  double eta_C = 0.0;
  double COP_C = 0.0;
};
// eta_C = (T_h - T_c)/T_h, COP_C = 1/eta_C; InvalidBias unless T_h > T_c > 0.
CarnotReference carnot_reference(double T_h, double T_c);

enum class Mode { HeatEngine, Refrigerator, Dissipator, Idle };
const char* to_string(Mode m);

// Sign conventions: heats positive into the reservoirs, W positive into the
// system. scale == 0 keeps the exact-zero idle semantics (and makes the
// classification invariant under rescaling).
Mode classify_mode(double Q_tr, double W, double scale = 0.0);

struct CycleReport {
  double Q_h = 0.0, Q_c = 0.0;          // per-cycle heats into reservoirs
  std::vector<double> W_strokes;        // works per stroke, into the system
  std::vector<double> Q_strokes;        // heats per stroke (into reservoirs)
  double W = 0.0;                       // total work into the system
  double eta = 0.0;                     // heat-engine efficiency, if engine
  double COP = 0.0;                     // refrigerator coefficient, if fridge
  Mode mode = Mode::Idle;
};

// Quasi-static four-stroke Carnot cycle of the qubit between splittings
// 2*B1 -> 2*B2 at T_h, adiabats with B/T fixed, return at T_c. Thin wrapper
// over the frozen Gibbs bookkeeping; contact switching costs are zero.
CycleReport carnot_cycle(double T_h, double T_c, double B1, double B2);

struct StrokeOptimum {
  double tau_c = 0.0, tau_h = 0.0, P_max = 0.0;
};
// Closed-form maximizer of P = [dS dT - T_c Sc/tau_c - T_h Sh/tau_h]/(tau_c+tau_h).
StrokeOptimum optimal_strokes(double Sigma_c, double Sigma_h, double dS, double T_c, double T_h);

struct MachineSummary {
  double A = 0.0;        // pumped-heat line integral
  double L2 = 0.0;       // tau * int Xdot.Lambda^S.Xdot dt (speed-weighted length^2)
  double kappa = 0.0;    // <kappa> = int_0^1 Lambda_{N+1,N+1} ds
  double Q_tr = 0.0;     // A + tau <kappa> dT/T
  double W = 0.0;        // L2/tau - (dT/T) A
  double P_he = 0.0;     // -W/tau
  double eta = 0.0;      // -W/Q_tr when meaningful
  double COP = 0.0;
  Mode mode = Mode::Idle;
  double tau = 0.0, dT_over_T = 0.0, T = 0.0;
};

struct MachineOptions {
  GeoOptions geo;          // bias enabled internally
  WorkOptions work;
  double bias_warn = 0.2;  // |dT/T| beyond which linear response is doubtful
};

MachineSummary machine_summary(const Protocol& protocol, const FieldMap& map,
                               const std::vector<BathSpec>& baths, double dT_over_T,
                               const MachineOptions& opts = {});

struct EnginePerformance {
  double tau_D = 0.0, tau_kappa = 0.0, tau_P = 0.0, tau_eta = 0.0;
  double P_he = 0.0;   // at the summary's tau
  double eta = 0.0;    // at the summary's tau
  double P_max = 0.0;  // (1/4)(dT/T)^2 A^2 / L2
  double eta_C = 0.0;  // dT/T at linear response
};

// Heat-engine figures; WrongOrientation when A <= 0, InvalidBias when
// dT/T <= 0.
EnginePerformance engine_performance(const MachineSummary& s);
double engine_power_at(const EnginePerformance& p, double A, double dT_over_T, double tau);
double engine_eta_at(const EnginePerformance& p, double tau);

enum class ProtocolFamily { Ellipse, PolygonSpline };
enum class Objective { MaxPower, MaxPumpedHeat, MinDissAtFixedA };

struct OptimizeOptions {
  ProtocolFamily family = ProtocolFamily::Ellipse;
  Objective objective = Objective::MaxPower;
  int budget = 400;            // candidate evaluations
  std::uint64_t seed = 1;
  double tau = 100.0;          // duration assigned to candidates
  double dT_over_T = 0.05;
  int spline_knots = 6;        // PolygonSpline family
  VecX box_lo, box_hi;         // parameter box (family-specific layout)
  double margin = 1e-3;        // min |B| along feasible paths
  double A_target = 0.0;       // MinDissAtFixedA constraint
  MachineOptions machine;
};

struct OptimizeTracePoint {
  int eval = 0;
  VecX params;
  double objective = 0.0;
};

struct OptimizeResult {
  VecX params;
  Protocol protocol;           // constant-rate reparametrized incumbent
  MachineSummary summary;
  double objective = 0.0;
  bool budget_exhausted = false;
  std::vector<OptimizeTracePoint> trace;
};

// Derivative-free search (coordinate descent + Nelder-Mead restarts) over the
// protocol family; every candidate is constant-rate reparametrized before
// scoring. Deterministic under fixed seed. InfeasibleFamily when no candidate
// avoids the degenerate region.
OptimizeResult optimize_protocol(const FieldMap& map, const std::vector<BathSpec>& baths,
                                 const OptimizeOptions& opts);

// Helper shared with the CLI: build the family protocol for given parameters.
Protocol family_protocol(ProtocolFamily family, const VecX& params, double tau, int spline_knots);

}  // namespace qthermo
