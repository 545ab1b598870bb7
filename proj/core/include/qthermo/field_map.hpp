// Control-to-field maps X -> B(X) defining H = -B(X).sigma.

#pragma once

#include <functional>
#include <string>

#include "qthermo/common.hpp"

namespace qthermo {

struct PolarField {
  double B;      // |B(X)|
  double theta;  // polar angle of B
  double phi;    // azimuthal angle
  Vec3 n;        // B/|B|
};

// Local orthonormal frame (e1, e2, n) with e3 = n aligned with the field.
// Columns of the rotation matrix map frame components to lab components.
struct Frame {
  Mat3 R;  // columns: e1, e2, n
  Vec3 e1() const { return R.col(0); }
  Vec3 e2() const { return R.col(1); }
  Vec3 n() const { return R.col(2); }
};

class FieldMap {
 public:
  enum class Kind { Spherical, PlanarXZ, SyntheticLattice, Custom };

  using Evaluator = std::function<Vec3(const VecX&)>;
  using Jacobian = std::function<Eigen::Matrix<double, 3, Eigen::Dynamic>(const VecX&)>;

  // X = (B, theta, phi); B(X) = B * (sin t cos p, sin t sin p, cos t)
  static FieldMap spherical();
  // X = (B_x, B_z); B(X) = (B_x, 0, B_z)
  static FieldMap planar_xz();
  // X = (X1, X2) on the torus [-pi,pi)^2;
  // B(X) = B0/2 * (sin X1, sin X2, 2 + delta - cos X1 - cos X2)
  static FieldMap synthetic_lattice(double B0, double delta);
  // user evaluator with analytic Jacobian
  static FieldMap custom(int dim, Evaluator f, Jacobian jac);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  bool periodic() const { return kind_ == Kind::SyntheticLattice; }
  double lattice_B0() const { return B0_; }
  double lattice_delta() const { return delta_; }

  Vec3 field(const VecX& X) const { return eval_(X); }
  // d B_i / d X_l, 3 x dim, analytic
  Eigen::Matrix<double, 3, Eigen::Dynamic> field_jacobian(const VecX& X) const { return jac_(X); }

  // Magnitude, angles and direction; throws DegenerateField below eps_degenerate.
  PolarField polar(const VecX& X, double eps_degenerate = kDegenerateFieldEps) const;

  // Smooth local frame with e3 = n. For the planar map e2 = +y and
  // e1 = e2 x n; otherwise the spherical (e_theta, e_phi, n) triad.
  // Throws GaugeDiscontinuity where the triad is ill-conditioned (field within
  // eps of the +-z axis for the spherical triad).
  Frame frame(const VecX& X, double eps_degenerate = kDegenerateFieldEps) const;

 private:
  Kind kind_ = Kind::Custom;
  int dim_ = 0;
  double B0_ = 0.0, delta_ = 0.0;
  Evaluator eval_;
  Jacobian jac_;
};

}  // namespace qthermo
