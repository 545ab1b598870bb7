// Shared aliases, unit conventions and error types.
//
// Units: hbar = k_B = 1 throughout. Energies, temperatures and field
// magnitudes share one reference energy unit; rates are energies; times are
// inverse energies. The qubit Hamiltonian is H = -B(X).sigma, so the level
// splitting at control point X is 2|B(X)| and every bath rate is evaluated
// at that splitting.

#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qthermo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

// Base error. `code()` is the stable machine-readable name that the CLI
// surfaces in run manifests.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(code + ": " + what), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define QTHERMO_DEFINE_ERROR(NAME)                              \
  class NAME : public Error {                                   \
   public:                                                      \
    explicit NAME(const std::string& what) : Error(#NAME, what) {} \
  }

QTHERMO_DEFINE_ERROR(DegenerateEnergy);
QTHERMO_DEFINE_ERROR(DegenerateField);
QTHERMO_DEFINE_ERROR(SingularKernel);
QTHERMO_DEFINE_ERROR(GaugeDiscontinuity);
QTHERMO_DEFINE_ERROR(NoConvergence);
QTHERMO_DEFINE_ERROR(QuadratureError);
QTHERMO_DEFINE_ERROR(BiasNonlinearity);
QTHERMO_DEFINE_ERROR(ZeroMetricSegment);
QTHERMO_DEFINE_ERROR(OpenProtocol);
QTHERMO_DEFINE_ERROR(GapClosure);
QTHERMO_DEFINE_ERROR(HorizonTooShort);
QTHERMO_DEFINE_ERROR(InvalidBias);
QTHERMO_DEFINE_ERROR(ZeroEntropySwing);
QTHERMO_DEFINE_ERROR(QuasistaticSingular);
QTHERMO_DEFINE_ERROR(WrongOrientation);
QTHERMO_DEFINE_ERROR(InfeasibleFamily);
QTHERMO_DEFINE_ERROR(BudgetExhausted);
QTHERMO_DEFINE_ERROR(ZeroCurrent);
QTHERMO_DEFINE_ERROR(ConfigError);

#undef QTHERMO_DEFINE_ERROR

// Default threshold below which |B(X)| is treated as a level crossing.
inline constexpr double kDegenerateFieldEps = 1e-10;

}  // namespace qthermo
