#include "qthermo/protocol.hpp"

#include <algorithm>
#include <cmath>

namespace qthermo {

namespace {
// wrap s into [0,1) for periodic evaluation
double wrap01(double s) {
  double w = s - std::floor(s);
  return w;
}
}  // namespace

CubicSpline::CubicSpline(std::vector<double> s, std::vector<double> y, bool periodic)
    : s_(std::move(s)), y_(std::move(y)), periodic_(periodic) {
  const int n = static_cast<int>(s_.size());
  if (n < 3) throw ConfigError("spline needs at least 3 knots");
  for (int i = 1; i < n; ++i)
    if (s_[i] <= s_[i - 1]) throw ConfigError("spline knots must be strictly increasing");
  if (periodic_ && std::abs(y_.front() - y_.back()) > 1e-12)
    throw ConfigError("periodic spline endpoint values differ");

  m_.assign(n, 0.0);
  std::vector<double> h(n - 1);
  for (int i = 0; i < n - 1; ++i) h[i] = s_[i + 1] - s_[i];

  if (!periodic_) {
    // natural spline, tridiagonal solve
    std::vector<double> a(n, 0), b(n, 0), c(n, 0), d(n, 0);
    b[0] = b[n - 1] = 1.0;
    for (int i = 1; i < n - 1; ++i) {
      a[i] = h[i - 1];
      b[i] = 2.0 * (h[i - 1] + h[i]);
      c[i] = h[i];
      d[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
    }
    for (int i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      d[i] -= w * d[i - 1];
    }
    m_[n - 1] = d[n - 1] / b[n - 1];
    for (int i = n - 2; i >= 0; --i) m_[i] = (d[i] - c[i] * m_[i + 1]) / b[i];
    return;
  }

  // periodic: unknowns m_0..m_{n-2} with m_{n-1} = m_0; cyclic tridiagonal via
  // Sherman-Morrison
  const int k = n - 1;
  std::vector<double> A(k), B(k), C(k), D(k);
  for (int i = 0; i < k; ++i) {
    const double hm = h[(i - 1 + k) % k], hp = h[i];
    const double ym = y_[(i - 1 + k) % k], y0 = y_[i], yp = y_[i + 1];
    A[i] = hm;
    B[i] = 2.0 * (hm + hp);
    C[i] = hp;
    D[i] = 6.0 * ((yp - y0) / hp - (y0 - ym) / hm);
  }
  auto solve_tri = [&](std::vector<double> rhs) {
    std::vector<double> bb(B), x(k);
    for (int i = 1; i < k; ++i) {
      const double w = A[i] / bb[i - 1];
      bb[i] -= w * C[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    x[k - 1] = rhs[k - 1] / bb[k - 1];
    for (int i = k - 2; i >= 0; --i) x[i] = (rhs[i] - C[i] * x[i + 1]) / bb[i];
    return x;
  };
  // corner entries: A[0] couples to index k-1, C[k-1] couples to index 0
  const double alpha = A[0], beta = C[k - 1];
  const double gamma = -B[0];
  std::vector<double> u(k, 0.0);
  u[0] = gamma;
  u[k - 1] = beta;
  std::vector<double> Bmod(B);
  Bmod[0] -= gamma;
  Bmod[k - 1] -= alpha * beta / gamma;
  std::swap(B, Bmod);
  A[0] = 0.0;
  C[k - 1] = 0.0;
  auto x1 = solve_tri(D);
  auto x2 = solve_tri(u);
  const double fact =
      (x1[0] + alpha * x1[k - 1] / gamma) / (1.0 + x2[0] + alpha * x2[k - 1] / gamma);
  for (int i = 0; i < k; ++i) m_[i] = x1[i] - fact * x2[i];
  m_[n - 1] = m_[0];
}

double CubicSpline::eval(double s) const {
  if (periodic_) s = s_.front() + wrap01((s - s_.front()) / (s_.back() - s_.front())) *
                                      (s_.back() - s_.front());
  s = std::clamp(s, s_.front(), s_.back());
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  int i = std::clamp<int>(static_cast<int>(it - s_.begin()) - 1, 0, static_cast<int>(s_.size()) - 2);
  const double h = s_[i + 1] - s_[i], a = (s_[i + 1] - s) / h, b = (s - s_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::deriv(double s) const {
  if (periodic_) s = s_.front() + wrap01((s - s_.front()) / (s_.back() - s_.front())) *
                                      (s_.back() - s_.front());
  s = std::clamp(s, s_.front(), s_.back());
  auto it = std::upper_bound(s_.begin(), s_.end(), s);
  int i = std::clamp<int>(static_cast<int>(it - s_.begin()) - 1, 0, static_cast<int>(s_.size()) - 2);
  const double h = s_[i + 1] - s_[i], a = (s_[i + 1] - s) / h, b = (s - s_[i]) / h;
  return (y_[i + 1] - y_[i]) / h +
         ((3.0 * b * b - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]) * h / 6.0;
}

Protocol Protocol::from_closure(int dim, Curve X, double duration, bool closed, CurveDeriv dX) {
  Protocol p;
  p.dim_ = dim;
  p.duration_ = duration;
  p.closed_ = closed;
  p.curve_ = std::move(X);
  p.dcurve_ = std::move(dX);
  p.sigma_ = [](double) { return 1.0; };
  p.sigma_norm_ = 1.0;
  p.build_time_table();
  p.verify();
  return p;
}

Protocol Protocol::from_samples(const std::vector<double>& s, const std::vector<VecX>& X,
                                double duration, bool closed) {
  if (s.size() != X.size() || s.size() < 3) throw ConfigError("protocol table malformed");
  const int dim = static_cast<int>(X.front().size());
  auto splines = std::make_shared<std::vector<CubicSpline>>();
  for (int d = 0; d < dim; ++d) {
    std::vector<double> col(s.size());
    for (size_t i = 0; i < s.size(); ++i) col[i] = X[i][d];
    splines->emplace_back(s, col, closed);
  }
  Protocol p;
  p.dim_ = dim;
  p.duration_ = duration;
  p.closed_ = closed;
  p.curve_ = [splines, dim](double ss) {
    VecX out(dim);
    for (int d = 0; d < dim; ++d) out[d] = (*splines)[d].eval(ss);
    return out;
  };
  p.dcurve_ = [splines, dim](double ss) {
    VecX out(dim);
    for (int d = 0; d < dim; ++d) out[d] = (*splines)[d].deriv(ss);
    return out;
  };
  p.sigma_ = [](double) { return 1.0; };
  p.sigma_norm_ = 1.0;
  p.build_time_table();
  p.verify();
  return p;
}

VecX Protocol::point(double s) const { return curve_(closed_ ? wrap01(s) : std::clamp(s, 0.0, 1.0)); }

VecX Protocol::tangent(double s) const {
  if (dcurve_) return dcurve_(closed_ ? wrap01(s) : std::clamp(s, 0.0, 1.0));
  const double h = 1e-6;
  if (closed_) return (curve_(wrap01(s + h)) - curve_(wrap01(s - h + 1.0))) / (2.0 * h);
  const double lo = std::max(0.0, s - h), hi = std::min(1.0, s + h);
  return (curve_(hi) - curve_(lo)) / (hi - lo);
}

double Protocol::speed(double s) const { return sigma_(std::clamp(s, 0.0, 1.0)) / sigma_norm_; }

void Protocol::build_time_table(int n) {
  tgrid_.assign(n + 1, 0.0);
  double acc = 0.0;
  double prev = sigma_(0.0);
  for (int i = 1; i <= n; ++i) {
    const double si = static_cast<double>(i) / n;
    const double cur = sigma_(si);
    if (cur <= 0.0 || prev <= 0.0) throw ConfigError("speed profile must be strictly positive");
    acc += 0.5 * (prev + cur) / n;
    tgrid_[i] = acc;
    prev = cur;
  }
  sigma_norm_ = acc;
  for (auto& t : tgrid_) t /= acc;
}

double Protocol::time_at(double s) const {
  s = std::clamp(s, 0.0, 1.0);
  const int n = static_cast<int>(tgrid_.size()) - 1;
  const double x = s * n;
  const int i = std::min(static_cast<int>(x), n - 1);
  const double f = x - i;
  return duration_ * ((1.0 - f) * tgrid_[i] + f * tgrid_[i + 1]);
}

double Protocol::s_at_time(double t) const {
  const double frac = std::clamp(t / duration_, 0.0, 1.0);
  const int n = static_cast<int>(tgrid_.size()) - 1;
  auto it = std::upper_bound(tgrid_.begin(), tgrid_.end(), frac);
  int i = std::clamp<int>(static_cast<int>(it - tgrid_.begin()) - 1, 0, n - 1);
  const double span = tgrid_[i + 1] - tgrid_[i];
  const double f = span > 0 ? (frac - tgrid_[i]) / span : 0.0;
  return (i + f) / n;
}

Protocol Protocol::with_speed(SpeedProfile sigma, int table_size) const {
  Protocol p(*this);
  p.sigma_ = std::move(sigma);
  p.build_time_table(table_size);
  return p;
}

Protocol Protocol::with_duration(double tau) const {
  Protocol p(*this);
  p.duration_ = tau;
  return p;
}

void Protocol::verify() const {
  if (duration_ <= 0.0) throw ConfigError("protocol duration must be > 0");
  if (closed_) {
    const VecX a = curve_(0.0), b = curve_(1.0);
    if ((a - b).cwiseAbs().maxCoeff() > 1e-12)
      throw ConfigError("closed protocol endpoints differ beyond 1e-12");
  }
}

}  // namespace qthermo
