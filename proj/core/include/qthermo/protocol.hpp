// Driving protocols: a curve X(s), s in [0,1], a positive normalized speed
// profile sigma(s) with t(s) = tau * int_0^s sigma, and a total duration tau.

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "qthermo/common.hpp"

namespace qthermo {

// Periodic or natural cubic spline through (s_i, y_i) samples on [0,1].
class CubicSpline {
 public:
  CubicSpline() = default;
  // knots must be strictly increasing, covering [0,1]; if periodic the first
  // and last values must agree.
  CubicSpline(std::vector<double> s, std::vector<double> y, bool periodic);
  double eval(double s) const;
  double deriv(double s) const;

 private:
  std::vector<double> s_, y_, m_;  // m = second derivatives at knots
  bool periodic_ = false;
};

class Protocol {
 public:
  using Curve = std::function<VecX(double)>;
  using CurveDeriv = std::function<VecX(double)>;
  using SpeedProfile = std::function<double(double)>;

  // Analytic closure; derivative optional (falls back to central differences).
  static Protocol from_closure(int dim, Curve X, double duration, bool closed,
                               CurveDeriv dX = nullptr);
  // Cubic-spline table of rows (s, X_1..X_N); clamped-periodic when closed.
  static Protocol from_samples(const std::vector<double>& s,
                               const std::vector<VecX>& X, double duration, bool closed);

  int dim() const { return dim_; }
  double duration() const { return duration_; }
  bool closed() const { return closed_; }

  VecX point(double s) const;
  VecX tangent(double s) const;  // dX/ds

  // sigma(s) (normalized so int_0^1 sigma ds = 1) and t(s) = tau*int_0^s sigma.
  double speed(double s) const;
  double time_at(double s) const;
  double s_at_time(double t) const;

  // Replace the speed profile (positive on [0,1]); normalization is handled here.
  Protocol with_speed(SpeedProfile sigma, int table_size = 2048) const;
  Protocol with_duration(double tau) const;

  // closed => X(0) == X(1) componentwise to 1e-12
  void verify() const;

 private:
  void build_time_table(int n = 2048);

  int dim_ = 0;
  double duration_ = 1.0;
  bool closed_ = false;
  Curve curve_;
  CurveDeriv dcurve_;
  SpeedProfile sigma_;  // unnormalized
  double sigma_norm_ = 1.0;
  std::vector<double> tgrid_;  // cumulative time fraction at uniform s grid
};

}  // namespace qthermo
