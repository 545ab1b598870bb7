// Weak-coupling master-equation kernels in Bloch form.
//
// Frame conventions: |1> = ground (energy -B), |2> = excited (+B); the Bloch
// vector r has r_z = p_g - p_e in the instantaneous eigenframe, so the frozen
// single-bath solution is (0, 0, tanh(B/T)). Internally everything is built
// from lab-frame tensors (the secular kernel is axially symmetric about the
// field direction, so no gauge choice enters); frame components are produced
// on demand with the map's smooth triad.
//
// Per-bath secular kernel for a coupling with longitudinal weight c^2 = (g.n)^2
// and transverse weight t^2 = 1 - c^2, rates evaluated at the splitting 2B:
//   Gt   = t^2 * gamma(2B) * (1 + 2 n(2B))        relaxation (T1) rate
//   Gphi = 2 c^2 * gamma(eps->0) n(eps->0)        pure dephasing rate
//   M    = -(Gt/2 + Gphi) (I - n n^T) - Gt n n^T
//   gvec = -t^2 * gamma(2B) * n                   so that M r = gvec gives
//                                                 r = tanh(B/T) n
// The unitary part is E v = -2B n x v.

#pragma once

#include <vector>

#include "qthermo/bath.hpp"
#include "qthermo/field_map.hpp"

namespace qthermo {

struct KernelOptions {
  double eps_degenerate = kDegenerateFieldEps;
  double condition_limit = 1e12;
};

struct Kernel {
  VecX X;
  Vec3 Bvec;
  double B = 0.0;
  Vec3 n{0, 0, 1};
  Mat3 E;                      // lab frame, antisymmetric
  std::vector<Mat3> M;         // lab frame, one per bath
  std::vector<Vec3> gvec;      // lab frame, one per bath
  std::vector<double> rate_abs, rate_emi;  // Gamma(2B), Gammabar(2B) per bath
  Frame frame;                 // e3 = n; reporting frame

  Mat3 Mtot() const {
    Mat3 out = Mat3::Zero();
    for (const auto& m : M) out += m;
    return out;
  }
  Vec3 gtot() const {
    Vec3 out = Vec3::Zero();
    for (const auto& g : gvec) out += g;
    return out;
  }
  Mat3 A() const { return E + Mtot(); }

  Vec3 to_frame(const Vec3& lab) const { return frame.R.transpose() * lab; }
  Vec3 to_lab(const Vec3& fr) const { return frame.R * fr; }
};

Kernel build_kernel(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                    const KernelOptions& opts = {});

// Stationary solution of (E + sum M_a) r = sum g_a. SingularKernel when the
// system is ill-conditioned (e.g. all couplings zero).
Vec3 frozen_steady_state_lab(const Kernel& k, const KernelOptions& opts = {});
// Same, in the reporting frame (e3 = n): single bath gives (0,0,tanh(B/T)).
Vec3 frozen_steady_state(const Kernel& k, const KernelOptions& opts = {});

struct JacobianOptions {
  double step = 1e-6;          // relative to max(|X|,1) per component
  bool richardson = false;     // 4th-order differences
  KernelOptions kernel;
};

// d r_f / d X_l of the lab-frame frozen solution (3 x N). Smooth everywhere
// the field is nondegenerate.
MatX frozen_jacobian_lab(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                         const JacobianOptions& opts = {});
// Covariant derivative in the map frame at X: R(X)^T d r_f/dX. Includes both
// the rate-variation and the basis-rotation contributions by construction.
// Throws GaugeDiscontinuity where the map's triad is undefined.
MatX frozen_jacobian(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                     const JacobianOptions& opts = {});

// At equal bath temperatures the frozen state is the Gibbs vector
// tanh(B/T) n, so its derivative is available in closed form:
//   d r_f/dX_l = (1/T) sech^2(B/T) (n.f_l) n + tanh(B/T) (f_l - n (n.f_l))/B.
// Used by the geometric tensor, where finite differences would lose relative
// accuracy deep in the low-temperature tail.
MatX gibbs_jacobian_lab(const FieldMap& map, const VecX& X, double temperature,
                        double eps_degenerate = kDegenerateFieldEps);

// Solve (E + sum M_a) r_a = sum_l (d r_f/dX_l) Xdot_l. Inputs and output in
// the lab frame; linear in Xdot.
Vec3 adiabatic_correction_lab(const Kernel& k, const MatX& jac_lab, const VecX& Xdot,
                              const KernelOptions& opts = {});
Vec3 adiabatic_correction(const Kernel& k, const MatX& jac_frame, const VecX& Xdot,
                          const KernelOptions& opts = {});

enum class StateOrder { Frozen, Adiabatic };

// Per-bath energy flux J_a (> 0 into bath a). For the frozen component the
// inhomogeneity participates (J_a = B (M_a r - g_a).n); the adiabatic
// component carries only the linear term.
std::vector<double> energy_current_lab(const Kernel& k, const Vec3& r_lab, StateOrder which);
std::vector<double> energy_current(const Kernel& k, const Vec3& r_frame, StateOrder which);

}  // namespace qthermo
