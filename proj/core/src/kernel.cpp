#include "qthermo/kernel.hpp"

#include <cmath>

namespace qthermo {

namespace {

Frame fallback_frame(const Vec3& n) {
  // orthonormal completion used only for component reporting when the map's
  // smooth triad is unavailable (field along +-z)
  Vec3 a = std::abs(n.z()) < 0.9 ? Vec3(0, 0, 1) : Vec3(1, 0, 0);
  Frame f;
  f.R.col(0) = a.cross(n).normalized();
  f.R.col(1) = n.cross(f.R.col(0));
  f.R.col(2) = n;
  return f;
}

Mat3 cross_generator(const Vec3& w) {
  Mat3 m;
  m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return m;
}

}  // namespace

Kernel build_kernel(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                    const KernelOptions& opts) {
  Kernel k;
  k.X = X;
  const PolarField p = map.polar(X, opts.eps_degenerate);
  k.Bvec = p.B * p.n;
  k.B = p.B;
  k.n = p.n;
  k.E = cross_generator(-2.0 * p.B * p.n);
  try {
    k.frame = map.frame(X, opts.eps_degenerate);
  } catch (const GaugeDiscontinuity&) {
    k.frame = fallback_frame(p.n);
  }

  const Mat3 Ppar = p.n * p.n.transpose();
  const Mat3 Pperp = Mat3::Identity() - Ppar;

  for (const auto& bath : baths) {
    bath.validate();
    double c2 = 0.0;
    switch (bath.coupling) {
      case CouplingKind::Axis: {
        const double c = bath.axis.normalized().dot(p.n);
        c2 = c * c;
        break;
      }
      case CouplingKind::Transverse:
        c2 = 0.0;
        break;
      case CouplingKind::Thermalization:
        c2 = 0.0;
        break;
    }
    const double t2 = 1.0 - c2;
    const double Gabs = t2 * rate_absorption(bath, p.B);
    const double Gemi = t2 * rate_emission(bath, p.B);
    const double Gt = Gabs + Gemi;  // = t^2 gamma(2B)(1+2n)
    k.rate_abs.push_back(Gabs);
    k.rate_emi.push_back(Gemi);

    Mat3 M;
    Vec3 g;
    if (bath.coupling == CouplingKind::Thermalization) {
      // isotropic reset toward the instantaneous Gibbs state at the T1 rate
      const double Gr = 0.5 * (rate_absorption(bath, p.B) + rate_emission(bath, p.B));
      M = -Gr * Mat3::Identity();
      g = -Gr * std::tanh(p.B / bath.temperature) * p.n;
    } else {
      const double Gphi = (c2 > 0.0) ? 2.0 * c2 * golden_rate(bath, 0.0) : 0.0;
      M = -(0.5 * Gt + Gphi) * Pperp - Gt * Ppar;
      g = -(Gemi - Gabs) * p.n;  // Gemi - Gabs = t^2 gamma(2B)
    }
    k.M.push_back(M);
    k.gvec.push_back(g);
  }
  return k;
}

namespace {

Vec3 solve_checked(const Mat3& A, const Vec3& b, double cond_limit, const char* what) {
  Eigen::JacobiSVD<Mat3> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double smin = svd.singularValues().minCoeff();
  const double smax = svd.singularValues().maxCoeff();
  if (smin <= 0.0 || smax / smin > cond_limit)
    throw SingularKernel(std::string(what) + ": condition number exceeds limit");
  return svd.solve(b);
}

}  // namespace

Vec3 frozen_steady_state_lab(const Kernel& k, const KernelOptions& opts) {
  return solve_checked(k.A(), k.gtot(), opts.condition_limit, "frozen_steady_state");
}

Vec3 frozen_steady_state(const Kernel& k, const KernelOptions& opts) {
  return k.to_frame(frozen_steady_state_lab(k, opts));
}

MatX frozen_jacobian_lab(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                         const JacobianOptions& opts) {
  const int N = static_cast<int>(X.size());
  MatX J(3, N);
  auto rf = [&](const VecX& Xq) {
    return frozen_steady_state_lab(build_kernel(map, baths, Xq, opts.kernel), opts.kernel);
  };
  for (int l = 0; l < N; ++l) {
    const double h = opts.step * std::max(1.0, std::abs(X[l]));
    VecX Xp = X, Xm = X;
    Xp[l] += h;
    Xm[l] -= h;
    Vec3 d = (rf(Xp) - rf(Xm)) / (2.0 * h);
    if (opts.richardson) {
      VecX Xp2 = X, Xm2 = X;
      Xp2[l] += 2.0 * h;
      Xm2[l] -= 2.0 * h;
      const Vec3 d2 = (rf(Xp2) - rf(Xm2)) / (4.0 * h);
      d = (4.0 * d - d2) / 3.0;
    }
    J.col(l) = d;
  }
  return J;
}

MatX frozen_jacobian(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                     const JacobianOptions& opts) {
  const Frame f = map.frame(X, opts.kernel.eps_degenerate);  // may throw GaugeDiscontinuity
  return f.R.transpose() * frozen_jacobian_lab(map, baths, X, opts);
}

MatX gibbs_jacobian_lab(const FieldMap& map, const VecX& X, double temperature,
                        double eps_degenerate) {
  const PolarField p = map.polar(X, eps_degenerate);
  const auto F = map.field_jacobian(X);
  const double bB = p.B / temperature;
  const double m = std::tanh(bB);
  const double ch = std::cosh(bB);  // 1 - m^2 cancels catastrophically at large bB
  const double sech2 = 1.0 / (ch * ch);
  const int N = static_cast<int>(X.size());
  MatX J(3, N);
  for (int l = 0; l < N; ++l) {
    const double dB = p.n.dot(F.col(l));
    const Vec3 dn = (F.col(l) - dB * p.n) / p.B;
    J.col(l) = sech2 / temperature * dB * p.n + m * dn;
  }
  return J;
}

Vec3 adiabatic_correction_lab(const Kernel& k, const MatX& jac_lab, const VecX& Xdot,
                              const KernelOptions& opts) {
  const Vec3 src = jac_lab * Xdot;
  return solve_checked(k.A(), src, opts.condition_limit, "adiabatic_correction");
}

Vec3 adiabatic_correction(const Kernel& k, const MatX& jac_frame, const VecX& Xdot,
                          const KernelOptions& opts) {
  const MatX jac_lab = k.frame.R * jac_frame;
  return k.to_frame(adiabatic_correction_lab(k, jac_lab, Xdot, opts));
}

std::vector<double> energy_current_lab(const Kernel& k, const Vec3& r_lab, StateOrder which) {
  std::vector<double> J;
  J.reserve(k.M.size());
  for (size_t a = 0; a < k.M.size(); ++a) {
    Vec3 flux = k.M[a] * r_lab;
    if (which == StateOrder::Frozen) flux -= k.gvec[a];
    J.push_back(k.B * flux.dot(k.n));
  }
  return J;
}

std::vector<double> energy_current(const Kernel& k, const Vec3& r_frame, StateOrder which) {
  return energy_current_lab(k, k.to_lab(r_frame), which);
}

}  // namespace qthermo
