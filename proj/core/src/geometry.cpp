#include "qthermo/geometry.hpp"

#include <cmath>
#include <vector>

namespace qthermo {

namespace {

Mat3 resolvent(const Kernel& k, ResponseMode mode) {
  const Mat3 A = (mode == ResponseMode::Full) ? k.A() : k.Mtot();
  Eigen::FullPivLU<Mat3> lu(A);
  if (!lu.isInvertible()) throw SingularKernel("geo_tensor: kernel not invertible");
  return lu.inverse();
}

double mean_temperature(const std::vector<BathSpec>& baths) {
  double T = baths.front().temperature;
  for (const auto& b : baths)
    if (std::abs(b.temperature - T) > 1e-12 * T)
      throw InvalidBias("geo_tensor requires equal bath temperatures (bias is perturbative)");
  return T;
}

}  // namespace

GeoTensor geo_tensor(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                     const GeoOptions& opts) {
  const int N = static_cast<int>(X.size());
  const double T = mean_temperature(baths);

  const Kernel k = build_kernel(map, baths, X, opts.jac.kernel);
  // equal temperatures are enforced above, so the frozen state is Gibbs and
  // its derivative is exact; finite differences would lose relative accuracy
  // in the tanh tail
  const MatX D = gibbs_jacobian_lab(map, X, T, opts.jac.kernel.eps_degenerate);
  const auto F = map.field_jacobian(X);  // 3 x N
  const Mat3 Ainv = resolvent(k, opts.mode);

  GeoTensor out;
  out.X = X;
  out.N = N;
  out.has_bias = opts.bias;
  const int M = N + (opts.bias ? 1 : 0);
  out.lambda.resize(M, M);

  // K_{ll'} = f_l . Ainv D_l' ; Lambda = -K^T gives a PSD symmetric part and
  // the Berry-type antisymmetric block with Lambda^A_{phi,theta} = +sin(t)/2
  const MatX K = F.transpose() * Ainv * D;
  out.lambda.topLeftCorner(N, N) = -K.transpose();

  if (!opts.bias) return out;
  if (baths.size() != 2)
    throw InvalidBias("thermal-bias row/column needs exactly two baths");
  const int c = opts.cold_index, h = 1 - c;

  // row: J_c response to velocities. The bare state-correction current carries
  // a reversible share; adding (T/2) dS/dX_l (an exact gradient, invisible to
  // every closed-cycle observable) leaves the Onsager-antisymmetric part.
  const double bB = k.B / T;
  const double sech2 = 1.0 / (std::cosh(bB) * std::cosh(bB));
  const Mat3 AinvFull = resolvent(k, ResponseMode::Full);
  for (int l = 0; l < N; ++l) {
    const Vec3 ra = AinvFull * D.col(l);
    const double dB_dXl = k.n.dot(F.col(l));
    out.lambda(N, l) =
        k.B * (k.M[c] * ra).dot(k.n) - 0.5 * bB * sech2 * dB_dXl;
  }

  // column and kappa: two-sided differences in x = DT/T with T_h = T(1+x/2),
  // T_c = T(1-x/2)
  const double dx = opts.bias_step;
  auto biased = [&](double x) {
    std::vector<BathSpec> bb = baths;
    bb[h].temperature = T * (1.0 + 0.5 * x);
    bb[c].temperature = T * (1.0 - 0.5 * x);
    const Kernel kb = build_kernel(map, bb, X, opts.jac.kernel);
    const Vec3 r = frozen_steady_state_lab(kb, opts.jac.kernel);
    const double Jc = energy_current_lab(kb, r, StateOrder::Frozen)[c];
    return std::pair<Vec3, double>(r, Jc);
  };
  // two-sided differences at dx and 2dx, Richardson-combined
  const auto [rp, Jp] = biased(+dx);
  const auto [rm, Jm] = biased(-dx);
  const auto [rp2, Jp2] = biased(+2.0 * dx);
  const auto [rm2, Jm2] = biased(-2.0 * dx);
  const Vec3 d1 = (rp - rm) / (2.0 * dx);
  const Vec3 d2 = (rp2 - rm2) / (4.0 * dx);
  const Vec3 drdx = (4.0 * d1 - d2) / 3.0;

  if (opts.check_bias_linearity) {
    const Vec3 r0 = frozen_steady_state_lab(k, opts.jac.kernel);
    const double lin = 0.5 * (rp - rm).norm();
    const double quad = (rp + rm - 2.0 * r0).norm();
    // the ratio is meaningful only where the linear response itself is not
    // accidentally cancelling (e.g. equal relaxation shares at theta = pi/4)
    const double floor = 1e-2 * dx * (r0.norm() + 0.1);
    if (lin > floor && quad > opts.bias_nonlinearity_tol * lin)
      throw BiasNonlinearity("quadratic-in-bias residual exceeds tolerance");
  }

  for (int l = 0; l < N; ++l) out.lambda(l, N) = -F.col(l).dot(drdx);
  out.lambda(N, N) = (4.0 * (Jp - Jm) / (2.0 * dx) - (Jp2 - Jm2) / (4.0 * dx)) / 3.0;
  return out;
}

TensorField make_tensor_field(const FieldMap& map, std::vector<BathSpec> baths,
                              const GeoOptions& opts) {
  return [map, baths = std::move(baths), opts](const VecX& X) {
    return geo_tensor(map, baths, X, opts);
  };
}

double dissipated_work(const Protocol& protocol, const TensorField& field, double dT_over_T,
                       const WorkOptions& opts) {
  const double tau = protocol.duration();
  // t-integral mapped to s: Xdot = X'(s)/(tau sigma), dt = tau sigma ds
  const double W_drive = integrate(
      [&](double s) {
        const VecX Xp = protocol.tangent(s);
        const GeoTensor g = field(protocol.point(s));
        const MatX lamS = g.sym().topLeftCorner(g.N, g.N);
        return Xp.dot(lamS * Xp) / protocol.speed(s);
      },
      0.0, 1.0, opts.quad) / tau;
  if (dT_over_T == 0.0) return W_drive;

  const double W_bias = integrate(
      [&](double s) {
        const GeoTensor g = field(protocol.point(s));
        if (!g.has_bias) throw InvalidBias("dissipated_work with bias needs a bias-enabled field");
        return g.lambda(g.N, g.N) * protocol.speed(s);
      },
      0.0, 1.0, opts.quad) * tau * dT_over_T * dT_over_T;
  return W_drive + W_bias;
}

double thermodynamic_length(const Protocol& protocol, const TensorField& field,
                            const WorkOptions& opts) {
  return integrate(
      [&](double s) {
        const VecX Xp = protocol.tangent(s);
        const GeoTensor g = field(protocol.point(s));
        const MatX lamS = g.sym().topLeftCorner(g.N, g.N);
        return std::sqrt(std::max(0.0, Xp.dot(lamS * Xp)));
      },
      0.0, 1.0, opts.quad);
}

BoundCheck dissipation_bound_check(const Protocol& protocol, const TensorField& field,
                                   double saturation_tol, const WorkOptions& opts) {
  BoundCheck out;
  out.TSigma = dissipated_work(protocol, field, 0.0, opts);
  const double L = thermodynamic_length(protocol, field, opts);
  out.bound = L * L / protocol.duration();
  out.saturated =
      std::abs(out.TSigma - out.bound) <= saturation_tol * std::max(out.TSigma, out.bound);
  return out;
}

Protocol constant_rate_reparametrize(const Protocol& protocol, const TensorField& field,
                                     int grid) {
  std::vector<double> s(grid + 1), m(grid + 1);
  double mmax = 0.0;
  for (int i = 0; i <= grid; ++i) {
    s[i] = static_cast<double>(i) / grid;
    const VecX Xp = protocol.tangent(s[i]);
    const GeoTensor g = field(protocol.point(s[i]));
    const MatX lamS = g.sym().topLeftCorner(g.N, g.N);
    m[i] = std::max(0.0, Xp.dot(lamS * Xp));
    mmax = std::max(mmax, m[i]);
  }
  if (mmax == 0.0) throw ZeroMetricSegment("metric vanishes along the whole path");
  for (int i = 0; i <= grid; ++i) {
    if (m[i] < 1e-24 * mmax) {
      const VecX Xp = protocol.tangent(s[i]);
      int worst = 0;
      Xp.cwiseAbs().maxCoeff(&worst);
      throw ZeroMetricSegment("metric degenerate near s = " + std::to_string(s[i]) +
                              " along control " + std::to_string(worst));
    }
  }
  auto table = std::make_shared<CubicSpline>(s, [&] {
    std::vector<double> y(grid + 1);
    for (int i = 0; i <= grid; ++i) y[i] = std::sqrt(m[i]);
    return y;
  }(), protocol.closed());
  return protocol.with_speed([table](double ss) { return std::max(table->eval(ss), 1e-300); });
}

SmallAmplitudeResult small_amplitude_diss(const FieldMap& map, const std::vector<BathSpec>& baths,
                                          const VecX& X0, const VecX& dX,
                                          const std::function<double(double)>& g, double t0,
                                          double t1, int time_grid,
                                          const GeoOptions& opts) {
  SmallAmplitudeResult out;
  const Kernel k = build_kernel(map, baths, X0, opts.jac.kernel);
  out.amplitude_warning = dX.norm() > 0.05 * k.B;

  const MatX D = frozen_jacobian_lab(map, baths, X0, opts.jac);
  const auto F = map.field_jacobian(X0);
  const Vec3 fsum = F * dX;  // f . dX
  const Vec3 dsum = D * dX;

  Eigen::ComplexEigenSolver<Mat3> es(k.A());
  if (es.info() != Eigen::Success) throw SingularKernel("relaxation-mode extraction failed");
  const Eigen::Vector3cd lam = es.eigenvalues();
  const Eigen::Matrix3cd V = es.eigenvectors();
  Eigen::FullPivLU<Eigen::Matrix3cd> lu(V);
  if (!lu.isInvertible()) throw SingularKernel("defective kernel spectrum");
  const Eigen::Vector3cd a = lu.solve(dsum.cast<std::complex<double>>());
  const Eigen::Vector3cd b = V.transpose() * fsum.cast<std::complex<double>>();

  // Psi(u) = f.e^{Au}.d = sum_k b_k a_k e^{lam_k u}
  auto Psi = [&](double u) {
    std::complex<double> acc = 0.0;
    for (int i = 0; i < 3; ++i) acc += b[i] * a[i] * std::exp(lam[i] * u);
    return acc.real();
  };

  const int n = time_grid;
  const double h = (t1 - t0) / n;
  std::vector<double> gd(n + 1), psi(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double t = t0 + i * h;
    const double hp = std::min(h, t1 - t), hm = std::min(h, t - t0);
    gd[i] = (g(t + hp) - g(t - hm)) / (hp + hm);
    psi[i] = Psi(i * h);
  }
  // W = int_{t0}^{t1} dt gdot(t) int_0^{t-t0} du Psi(u) gdot(t-u)
  double W = 0.0;
  for (int i = 0; i <= n; ++i) {
    double inner = 0.0;
    for (int j = 0; j <= i; ++j) {
      const double w = (j == 0 || j == i) ? 0.5 : 1.0;
      inner += w * psi[j] * gd[i - j];
    }
    inner *= h;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    W += w * gd[i] * inner;
  }
  out.W_diss = W * h;
  return out;
}

}  // namespace qthermo
