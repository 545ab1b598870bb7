#include "qthermo/field_map.hpp"

#include <cmath>

namespace qthermo {

FieldMap FieldMap::spherical() {
  FieldMap m;
  m.kind_ = Kind::Spherical;
  m.dim_ = 3;
  m.eval_ = [](const VecX& X) {
    const double B = X[0], th = X[1], ph = X[2];
    return Vec3(B * std::sin(th) * std::cos(ph), B * std::sin(th) * std::sin(ph),
                B * std::cos(th));
  };
  m.jac_ = [](const VecX& X) {
    const double B = X[0], th = X[1], ph = X[2];
    const double st = std::sin(th), ct = std::cos(th), sp = std::sin(ph), cp = std::cos(ph);
    Eigen::Matrix<double, 3, Eigen::Dynamic> J(3, 3);
    J.col(0) << st * cp, st * sp, ct;                    // d/dB
    J.col(1) << B * ct * cp, B * ct * sp, -B * st;       // d/dtheta
    J.col(2) << -B * st * sp, B * st * cp, 0.0;          // d/dphi
    return J;
  };
  return m;
}

FieldMap FieldMap::planar_xz() {
  FieldMap m;
  m.kind_ = Kind::PlanarXZ;
  m.dim_ = 2;
  m.eval_ = [](const VecX& X) { return Vec3(X[0], 0.0, X[1]); };
  m.jac_ = [](const VecX&) {
    Eigen::Matrix<double, 3, Eigen::Dynamic> J(3, 2);
    J.col(0) << 1.0, 0.0, 0.0;
    J.col(1) << 0.0, 0.0, 1.0;
    return J;
  };
  return m;
}

FieldMap FieldMap::synthetic_lattice(double B0, double delta) {
  FieldMap m;
  m.kind_ = Kind::SyntheticLattice;
  m.dim_ = 2;
  m.B0_ = B0;
  m.delta_ = delta;
  m.eval_ = [B0, delta](const VecX& X) {
    return Vec3(0.5 * B0 * std::sin(X[0]), 0.5 * B0 * std::sin(X[1]),
                0.5 * B0 * (2.0 + delta - std::cos(X[0]) - std::cos(X[1])));
  };
  m.jac_ = [B0](const VecX& X) {
    Eigen::Matrix<double, 3, Eigen::Dynamic> J(3, 2);
    J.col(0) << 0.5 * B0 * std::cos(X[0]), 0.0, 0.5 * B0 * std::sin(X[0]);
    J.col(1) << 0.0, 0.5 * B0 * std::cos(X[1]), 0.5 * B0 * std::sin(X[1]);
    return J;
  };
  return m;
}

FieldMap FieldMap::custom(int dim, Evaluator f, Jacobian jac) {
  FieldMap m;
  m.kind_ = Kind::Custom;
  m.dim_ = dim;
  m.eval_ = std::move(f);
  m.jac_ = std::move(jac);
  return m;
}

PolarField FieldMap::polar(const VecX& X, double eps_degenerate) const {
  const Vec3 B = eval_(X);
  const double mag = B.norm();
  if (mag < eps_degenerate)
    throw DegenerateField("|B| = " + std::to_string(mag) + " below degeneracy threshold");
  PolarField p;
  p.B = mag;
  p.n = B / mag;
  p.theta = std::acos(std::clamp(p.n.z(), -1.0, 1.0));
  p.phi = std::atan2(p.n.y(), p.n.x());
  return p;
}

Frame FieldMap::frame(const VecX& X, double eps_degenerate) const {
  const PolarField p = polar(X, eps_degenerate);
  Frame f;
  if (kind_ == Kind::PlanarXZ) {
    // theta measured from +z in the xz-plane; e2 = +y fixed, e1 = e_theta
    const Vec3 e2(0.0, 1.0, 0.0);
    f.R.col(0) = e2.cross(p.n);
    f.R.col(1) = e2;
    f.R.col(2) = p.n;
    return f;
  }
  const double st = std::sin(p.theta);
  if (st < 1e-12) {
    // spherical triad undefined on the z axis; callers that only need lab
    // quantities should not land here
    throw GaugeDiscontinuity("field parallel to z axis: spherical frame undefined");
  }
  const double ct = std::cos(p.theta), sp = std::sin(p.phi), cp = std::cos(p.phi);
  f.R.col(0) = Vec3(ct * cp, ct * sp, -st);   // e_theta
  f.R.col(1) = Vec3(-sp, cp, 0.0);            // e_phi
  f.R.col(2) = p.n;
  return f;
}

}  // namespace qthermo
