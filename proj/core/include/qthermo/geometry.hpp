// Thermal geometric tensor, dissipated work, thermodynamic length, the
// dissipation bound, constant-rate reparametrization, and the small-amplitude
// linear-response dissipated work.

#pragma once

#include <functional>
#include <optional>

#include "qthermo/kernel.hpp"
#include "qthermo/protocol.hpp"
#include "qthermo/quadrature.hpp"

namespace qthermo {

// Which resolvent enters the linear response.
//   Full:        (E + sum M_a)^-1 -- consistent with the time-dependent Bloch
//                equation; the default everywhere.
//   Dissipative: (sum M_a)^-1 -- the closed-form route behind the published
//                spherical metric; differs from Full in the coherence sector.
enum class ResponseMode { Full, Dissipative };

struct GeoOptions {
  ResponseMode mode = ResponseMode::Full;
  bool bias = false;        // add the thermal-bias row/column (needs 2 baths)
  int cold_index = 1;       // bath whose current defines J_c
  double bias_step = 1e-4;  // delta(DT/T) for the two-sided differences
  bool check_bias_linearity = true;
  double bias_nonlinearity_tol = 1e-3;
  JacobianOptions jac;
};

struct GeoTensor {
  VecX X;
  int N = 0;
  bool has_bias = false;
  MatX lambda;  // (N [+1]) x (N [+1]); index N is the DT/T entry when present

  MatX sym() const { return 0.5 * (lambda + lambda.transpose()); }
  MatX antisym() const { return 0.5 * (lambda - lambda.transpose()); }
};

GeoTensor geo_tensor(const FieldMap& map, const std::vector<BathSpec>& baths, const VecX& X,
                     const GeoOptions& opts = {});

using TensorField = std::function<GeoTensor(const VecX&)>;
TensorField make_tensor_field(const FieldMap& map, std::vector<BathSpec> baths,
                              const GeoOptions& opts = {});

struct WorkOptions {
  QuadratureOptions quad{1e-10, 1e-6, 8, 2048};
};

// W_diss = int_0^tau Xdot.Lambda^S.Xdot dt + (DT/T)^2 int_0^tau Lambda_kk dt.
double dissipated_work(const Protocol& protocol, const TensorField& field,
                       double dT_over_T = 0.0, const WorkOptions& opts = {});

// L = int_0^tau sqrt(Xdot.Lambda^S.Xdot) dt; reparametrization invariant.
double thermodynamic_length(const Protocol& protocol, const TensorField& field,
                            const WorkOptions& opts = {});

struct BoundCheck {
  double TSigma = 0.0;    // dissipated work at zero bias
  double bound = 0.0;     // L^2 / tau
  bool saturated = false; // relative gap below tol
};
BoundCheck dissipation_bound_check(const Protocol& protocol, const TensorField& field,
                                   double saturation_tol = 1e-6,
                                   const WorkOptions& opts = {});

// Same geometric path, speed resampled so the pointwise dissipation rate is
// constant; the output saturates the bound. ZeroMetricSegment when the metric
// vanishes along a sub-arc.
Protocol constant_rate_reparametrize(const Protocol& protocol, const TensorField& field,
                                     int grid = 512);

struct SmallAmplitudeResult {
  double W_diss = 0.0;
  bool amplitude_warning = false;  // |dX| above 5% of the field scale
};

// W_diss for X(t) = X0 + g(t) dX via the force-force relaxation function
// Psi_{ll'}(u) = f_l . e^{Au} (d r_f/dX_l'), A = E + sum M_a.
SmallAmplitudeResult small_amplitude_diss(const FieldMap& map, const std::vector<BathSpec>& baths,
                                          const VecX& X0, const VecX& dX,
                                          const std::function<double(double)>& g, double t0,
                                          double t1, int time_grid = 800,
                                          const GeoOptions& opts = {});

}  // namespace qthermo
