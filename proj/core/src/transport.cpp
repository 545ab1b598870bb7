#include "qthermo/transport.hpp"

#include <cmath>

namespace qthermo {

TransportPoint steady_current(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                              const BathSpec& bath_r, const KernelOptions& opts) {
  const Kernel k = build_kernel(map, {bath_l, bath_r}, X, opts);
  const Vec3 r = frozen_steady_state_lab(k, opts);
  const auto J = energy_current_lab(k, r, StateOrder::Frozen);
  TransportPoint p;
  p.T = 0.5 * (bath_l.temperature + bath_r.temperature);
  p.dT = bath_l.temperature - bath_r.temperature;
  p.J_l = J[0];
  p.J_r = J[1];
  return p;
}

double landauer_current(const std::function<double(double)>& transmission, double T_h,
                        double T_c, const LandauerOptions& opts) {
  if (T_h <= 0.0 || T_c <= 0.0) throw InvalidBias("landauer_current needs positive temperatures");
  const double Tmax = std::max(T_h, T_c);
  const double emax = opts.eps_max > 0.0 ? opts.eps_max : 60.0 * Tmax;
  auto integrand = [&](double e) {
    if (e <= 0.0) return transmission(0.0) * (T_h - T_c);  // eps->0 limit of eps*(n_h - n_c)
    const double tr = transmission(e);
    if (tr == 0.0) return 0.0;
    return e * tr * (bose_einstein(e, T_h) - bose_einstein(e, T_c));
  };
  // Bose-aware split at the thermal scale
  const double esplit = std::min(Tmax, emax / 2);
  return integrate(integrand, 0.0, esplit, opts.quad) +
         integrate(integrand, esplit, emax, opts.quad);
}

namespace {
double cold_current(const FieldMap& map, const VecX& X, BathSpec bl, BathSpec br, double T,
                    double dT, const KernelOptions& opts) {
  bl.temperature = T + 0.5 * dT;
  br.temperature = T - 0.5 * dT;
  return steady_current(map, X, bl, br, opts).J_r;
}
}  // namespace

Conductance thermal_conductance(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                                const BathSpec& bath_r, double T, double rel_step,
                                const KernelOptions& opts) {
  const double d = rel_step * T;
  const double Jp = cold_current(map, X, bath_l, bath_r, T, +d, opts);
  const double Jm = cold_current(map, X, bath_l, bath_r, T, -d, opts);
  Conductance c;
  c.G_th = (Jp - Jm) / (2.0 * d);
  c.G_over_GQ = c.G_th / (M_PI * M_PI * T / 3.0);
  return c;
}

double rectification(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                     const BathSpec& bath_r, double T, double dT, const KernelOptions& opts) {
  if (std::abs(dT) >= 2.0 * T) throw InvalidBias("rectification needs |dT| < 2T");
  const double Jp = cold_current(map, X, bath_l, bath_r, T, dT, opts);
  const double Jm = cold_current(map, X, bath_l, bath_r, T, -dT, opts);
  const double den = Jp - Jm;
  if (std::abs(den) < 1e-14 * std::max({std::abs(Jp), std::abs(Jm), 1e-300}))
    throw ZeroCurrent("rectification: forward and reverse currents cancel");
  return (Jp + Jm) / den;
}

double rate_asymmetry(const FieldMap& map, const VecX& X, const BathSpec& bath_l,
                      const BathSpec& bath_r, double T, const KernelOptions& opts) {
  BathSpec bl = bath_l, br = bath_r;
  bl.temperature = T;
  br.temperature = T;
  const Kernel k = build_kernel(map, {bl, br}, X, opts);
  const double Gl = k.rate_abs[0] + k.rate_emi[0];
  const double Gr = k.rate_abs[1] + k.rate_emi[1];
  if (Gl + Gr == 0.0) throw SingularKernel("rate_asymmetry: both baths decoupled");
  return (Gl - Gr) / (Gl + Gr);
}

}  // namespace qthermo
