// Bath descriptions and elementary statistical functions.

#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "qthermo/common.hpp"

namespace qthermo {

// Bose-Einstein occupation n(eps,T) = 1/(e^{eps/T} - 1).
// eps must be positive: the distribution diverges at eps = 0.
double bose_einstein(double eps, double temperature);

enum class SpectralFamily { PowerLaw, Lorentzian };

// How the bath couples to the qubit.
//   Axis:           H_cont = ghat.sigma (x) sum_k V_k (a_k + a_k^dag), fixed lab axis.
//   Transverse:     coupling follows the instantaneous eigenframe and is purely
//                   off-diagonal there (the single-bath model behind the
//                   sigma^+/sigma^- dissipator).
//   Thermalization: isotropic reset toward the instantaneous Gibbs state at the
//                   T1 rate; the model behind the closed-form spherical metric.
enum class CouplingKind { Axis, Transverse, Thermalization };

struct BathSpec {
  std::string label = "bath";
  CouplingKind coupling = CouplingKind::Axis;
  Vec3 axis{0.0, 0.0, 1.0};  // used when coupling == Axis (normalized on use)

  SpectralFamily family = SpectralFamily::PowerLaw;
  // power-law: gamma(eps) = strength * eps^exponent * exp(-eps/cutoff)
  double strength = 1.0;  // gamma_0 (power-law) or alpha (lorentzian)
  double exponent = 1.0;  // s; 1 = Ohmic
  double cutoff = std::numeric_limits<double>::infinity();  // eps_C
  // lorentzian: gamma(eps) = 2*strength*eps*Omega^2 / ((Omega^2-eps^2)^2 + (2*width*eps)^2)
  double resonance = 1.0;  // Omega
  double width = 0.1;      // gamma (resonator linewidth)

  double temperature = 1.0;  // T > 0, energy units

  void validate() const;
};

// Spectral function gamma(eps) >= 0 for eps >= 0; DegenerateEnergy for eps < 0.
double spectral_rate(const BathSpec& bath, double eps);

// One-sided golden rule rate at signed transition energy:
//   eps > 0 : absorption  gamma(eps) n(eps)
//   eps < 0 : emission    gamma(|eps|) (1 + n(|eps|))
//   eps = 0 : the eps->0 limit (gamma0*T for Ohmic; 0 for super-Ohmic;
//             diverges for sub-Ohmic -> DegenerateEnergy)
double golden_rate(const BathSpec& bath, double eps);

// Absorption / emission rates at the qubit splitting 2B.
inline double rate_absorption(const BathSpec& b, double B) { return golden_rate(b, 2.0 * B); }
inline double rate_emission(const BathSpec& b, double B) { return golden_rate(b, -2.0 * B); }

}  // namespace qthermo
