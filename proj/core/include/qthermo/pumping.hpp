// Heat pumping between baths, power pumping between drives, Berry curvature
// and Chern numbers of the field maps, and Floquet two-tone pumping.

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qthermo/geometry.hpp"

namespace qthermo {

// Heat-pump vector field: the thermal-bias row of the geometric tensor
// restricted to the drive entries, as a function of X.
using PumpField = std::function<VecX(const VecX&)>;
PumpField make_pump_field(const FieldMap& map, std::vector<BathSpec> baths,
                          const GeoOptions& opts = {});

struct PumpedHeat {
  double Q = 0.0;             // line integral of the pump field
  double stokes = 0.0;        // curl flux through the enclosed region (2D maps)
  double stokes_residual = 0.0;  // |Q - stokes| / max(|Q|, tiny)
  bool stokes_checked = false;
};

struct PumpedHeatOptions {
  QuadratureOptions quad{1e-10, 1e-6, 16, 4096};
  bool stokes_check = true;  // only possible for 2-dimensional control spaces
  int stokes_radial = 48;    // radial resolution of the star-shaped sweep
  int stokes_angular = 256;
  double curl_step = 1e-5;
};

// Q_pump = closed line integral of the pump field along the protocol path;
// throws OpenProtocol for non-closed curves. The Stokes cross-check assumes a
// star-shaped curve (true for the ellipse/quarter-plane families).
PumpedHeat pumped_heat(const Protocol& protocol, const PumpField& field,
                       const PumpedHeatOptions& opts = {});

// (P_l - P_l')/2 sample by sample.
std::vector<double> power_pump(const std::vector<double>& P_l, const std::vector<double>& P_lp);

// Adiabatic pointwise pump between drives l and lp: Xdot_l Lambda^A_{l,lp} Xdot_lp.
double power_pump_adiabatic(const GeoTensor& g, const VecX& Xdot, int l, int lp);

enum class Band { Ground, Excited };

// Gauge-invariant band curvature of H = -B(X).sigma via the projector form
//   Omega = +1/2 n.(d_a n x d_b n),   ground band (excited carries -Omega),
// over the map's curvature pair: (theta,phi) for the spherical map and
// (X2,X1) for 2D maps -- orientations fixed so the spherical ground band is
// +sin(theta)/2 and the sBz plaquette sum reproduces chern_number.
// Throws GapClosure when the splitting 2|B| is below gap_tol.
double berry_curvature(const FieldMap& map, const VecX& X, Band band = Band::Ground,
                       double gap_tol = 1e-8);

struct ChernResult {
  double C = 0.0;
  bool dirac_flag = false;                    // gap closed somewhere on the grid
  int excluded_plaquettes = 0;                // plaquettes dropped around closures
  std::vector<std::pair<int, int>> closures;  // grid indices of gap closures
};

// Link-variable plaquette Chern number over the synthetic Brillouin zone.
// Gapped maps give an exact integer; at a Dirac point the plaquettes inside
// exclusion_radius are dropped and the principal value is reported with the
// dirac flag set.
ChernResult chern_number(const FieldMap& map, int resolution, Band band = Band::Ground,
                         double gap_tol = 1e-8, double exclusion_radius = -1.0);

struct FloquetOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int trace_points = 200;          // running-average samples
  double drift_tol = 0.01;         // max relative drift over the last decade
  bool require_converged = false;  // throw HorizonTooShort instead of flagging
  std::vector<std::pair<double, double>> phase_grid = {{0.0, 0.0}};
};

struct FloquetResult {
  double ratio = 0.0;  // 2*pi*Pbar/(w1*w2): converges to the Chern number
  double Pbar = 0.0;
  bool horizon_ok = false;
  bool commensurate_warning = false;
  std::vector<std::pair<double, double>> trace;  // (t, running ratio)
};

// Two-tone Schroedinger evolution X(t) = (w1 t + p1, w2 t + p2) starting in
// the instantaneous ground band; averages P_pump = (P_1 - P_2)/2 with
// P_l = w_l <F_l> over the horizon and the phase grid.
FloquetResult floquet_pump(const FieldMap& map, double w1, double w2, double horizon,
                           const FloquetOptions& opts = {});

}  // namespace qthermo
