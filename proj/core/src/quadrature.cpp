#include "qthermo/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace qthermo {

namespace {
double panels(const std::function<double(double)>& f, double a, double b, int n) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double h = (b - a) / n;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += GK::integrate(f, a + i * h, a + (i + 1) * h, 0);
  }
  return acc;
}
}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  int n = opts.initial_panels;
  double prev = panels(f, a, b, n);
  while (n <= opts.max_panels) {
    n *= 2;
    const double cur = panels(f, a, b, n);
    const double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
    if (std::abs(cur - prev) <= std::max(opts.doubling_tol * scale, opts.abs_tol)) return cur;
    prev = cur;
  }
  throw QuadratureError("node doubling did not converge below " +
                        std::to_string(opts.doubling_tol));
}

}  // namespace qthermo
