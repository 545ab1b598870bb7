#include "qthermo/bath.hpp"

#include <cmath>

namespace qthermo {

double bose_einstein(double eps, double temperature) {
  if (eps <= 0.0)
    throw DegenerateEnergy("bose_einstein requires eps > 0, got " + std::to_string(eps));
  if (temperature <= 0.0)
    throw DegenerateEnergy("bose_einstein requires T > 0, got " + std::to_string(temperature));
  const double x = eps / temperature;
  if (x > 700.0) return 0.0;  // below double underflow of e^{-x}
  return 1.0 / std::expm1(x);
}

void BathSpec::validate() const {
  if (temperature <= 0.0) throw ConfigError("bath '" + label + "': temperature must be > 0");
  if (strength < 0.0) throw ConfigError("bath '" + label + "': coupling strength must be >= 0");
  if (family == SpectralFamily::PowerLaw && exponent <= 0.0)
    throw ConfigError("bath '" + label + "': power-law exponent must be > 0");
  if (family == SpectralFamily::Lorentzian && (resonance <= 0.0 || width <= 0.0))
    throw ConfigError("bath '" + label + "': Lorentzian needs resonance > 0 and width > 0");
  if (coupling == CouplingKind::Axis && axis.norm() == 0.0)
    throw ConfigError("bath '" + label + "': coupling axis must be a nonzero vector");
}

double spectral_rate(const BathSpec& bath, double eps) {
  if (eps < 0.0)
    throw DegenerateEnergy("spectral_rate requires eps >= 0, got " + std::to_string(eps));
  if (eps == 0.0) return 0.0;
  if (bath.family == SpectralFamily::PowerLaw) {
    return bath.strength * std::pow(eps, bath.exponent) * std::exp(-eps / bath.cutoff);
  }
  const double W2 = bath.resonance * bath.resonance;
  const double d1 = W2 - eps * eps;
  const double d2 = 2.0 * bath.width * eps;
  return 2.0 * bath.strength * eps * W2 / (d1 * d1 + d2 * d2);
}

double golden_rate(const BathSpec& bath, double eps) {
  const double T = bath.temperature;
  if (eps == 0.0) {
    // lim_{e->0} gamma(e) n(e) = T * lim gamma(e)/e
    if (bath.family == SpectralFamily::Lorentzian)
      return 2.0 * bath.strength * T / (bath.resonance * bath.resonance);
    if (bath.exponent == 1.0) return bath.strength * T;
    if (bath.exponent > 1.0) return 0.0;
    throw DegenerateEnergy("sub-Ohmic zero-frequency rate diverges (bath '" + bath.label + "')");
  }
  if (eps > 0.0) return spectral_rate(bath, eps) * bose_einstein(eps, T);
  return spectral_rate(bath, -eps) * (1.0 + bose_einstein(-eps, T));
}

}  // namespace qthermo
