// Adaptive quadrature used throughout: Gauss-Kronrod panels with an explicit
// node-doubling convergence check on top (QuadratureError when it fails).

#pragma once

#include <functional>

#include "qthermo/common.hpp"

namespace qthermo {

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double doubling_tol = 1e-6;  // relative change allowed between n and 2n panels
  int initial_panels = 8;
  int max_panels = 4096;
  double abs_tol = 1e-12;  // acceptance floor for integrals that vanish
};

// Integrate f over [a,b]: composite G7K15 with panel doubling until the
// result changes by less than doubling_tol (relative); throws QuadratureError
// if max_panels is reached first.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

}  // namespace qthermo
