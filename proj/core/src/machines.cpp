#include "qthermo/machines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace qthermo {

CarnotReference carnot_reference(double T_h, double T_c) {
  if (!(T_h > T_c) || T_c <= 0.0)
    throw InvalidBias("carnot_reference needs T_h > T_c > 0");
  CarnotReference r;
  r.eta_C = (T_h - T_c) / T_h;
  r.COP_C = 1.0 / r.eta_C;
  return r;
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::HeatEngine: return "heat-engine";
    case Mode::Refrigerator: return "refrigerator";
    case Mode::Dissipator: return "dissipator";
    case Mode::Idle: return "idle";
  }
  return "?";
}

Mode classify_mode(double Q_tr, double W, double scale) {
  const double tol = scale > 0.0 ? 1e-12 * scale : 0.0;
  if (std::abs(Q_tr) <= tol && std::abs(W) <= tol) return Mode::Idle;
  if (W < -tol) return Mode::HeatEngine;
  if (Q_tr < -tol && W > tol) return Mode::Refrigerator;
  return Mode::Dissipator;
}

namespace {
double gibbs_energy(double B, double T) { return -B * std::tanh(B / T); }
double gibbs_entropy(double B, double T) {
  const double x = B / T;
  return std::log(2.0 * std::cosh(x)) - x * std::tanh(x);
}
}  // namespace

CycleReport carnot_cycle(double T_h, double T_c, double B1, double B2) {
  if (!(T_h > T_c) || T_c <= 0.0) throw InvalidBias("carnot_cycle needs T_h > T_c > 0");
  if (B1 <= 0.0 || B2 <= 0.0) throw DegenerateField("carnot_cycle needs B > 0");
  // isothermal at T_h: B1 -> B2 ; adiabats keep B/T fixed
  const double B3 = B2 * T_c / T_h, B4 = B1 * T_c / T_h;
  CycleReport rep;
  auto isothermal = [&](double Ba, double Bb, double T) {
    const double dS = gibbs_entropy(Bb, T) - gibbs_entropy(Ba, T);
    const double Qres = -T * dS;  // heat into the reservoir
    const double W = gibbs_energy(Bb, T) - gibbs_energy(Ba, T) + Qres;
    return std::pair<double, double>(W, Qres);
  };
  auto adiabat = [&](double Ba, double Ta, double Bb, double Tb) {
    return gibbs_energy(Bb, Tb) - gibbs_energy(Ba, Ta);  // pure work
  };
  const auto [W1, Qh] = isothermal(B1, B2, T_h);
  const double W2 = adiabat(B2, T_h, B3, T_c);
  const auto [W3, Qc] = isothermal(B3, B4, T_c);
  const double W4 = adiabat(B4, T_c, B1, T_h);
  rep.W_strokes = {W1, W2, W3, W4};
  rep.Q_strokes = {Qh, 0.0, Qc, 0.0};
  rep.Q_h = Qh;
  rep.Q_c = Qc;
  rep.W = W1 + W2 + W3 + W4;
  rep.mode = classify_mode(rep.Q_c, rep.W);
  if (rep.mode == Mode::HeatEngine) rep.eta = rep.W / rep.Q_h;  // both negative
  if (rep.mode == Mode::Refrigerator) rep.COP = -rep.Q_c / rep.W;
  return rep;
}

StrokeOptimum optimal_strokes(double Sigma_c, double Sigma_h, double dS, double T_c, double T_h) {
  if (!(T_h > T_c) || T_c <= 0.0) throw InvalidBias("optimal_strokes needs T_h > T_c > 0");
  if (dS == 0.0) throw ZeroEntropySwing("optimal_strokes needs a nonzero entropy swing");
  if (Sigma_c <= 0.0 || Sigma_h <= 0.0)
    throw QuasistaticSingular("optimal_strokes: dissipationless stroke gives unbounded power");
  const double dT = T_h - T_c;
  StrokeOptimum o;
  const double ratio = std::sqrt(T_c * Sigma_c / (T_h * Sigma_h));
  o.tau_h = 2.0 * T_h * Sigma_h / (dS * dT) * (1.0 + ratio);
  o.tau_c = o.tau_h * ratio;
  const double denom = std::sqrt(T_h * Sigma_h) + std::sqrt(T_c * Sigma_c);
  o.P_max = dS * dS * dT * dT / (4.0 * denom * denom);
  return o;
}

MachineSummary machine_summary(const Protocol& protocol, const FieldMap& map,
                               const std::vector<BathSpec>& baths, double dT_over_T,
                               const MachineOptions& opts_in) {
  if (!protocol.closed()) throw OpenProtocol("machine_summary needs a closed protocol");
  MachineOptions opts = opts_in;
  opts.geo.bias = true;
  const TensorField field = make_tensor_field(map, baths, opts.geo);

  MachineSummary s;
  s.tau = protocol.duration();
  s.dT_over_T = dT_over_T;
  s.T = baths.front().temperature;

  s.A = integrate(
      [&](double u) {
        const GeoTensor g = field(protocol.point(u));
        return VecX(g.lambda.row(g.N).head(g.N)).dot(protocol.tangent(u));
      },
      0.0, 1.0, opts.work.quad);
  s.L2 = s.tau * dissipated_work(protocol, field, 0.0, opts.work);
  s.kappa = integrate(
      [&](double u) {
        const GeoTensor g = field(protocol.point(u));
        return g.lambda(g.N, g.N) * protocol.speed(u);
      },
      0.0, 1.0, opts.work.quad);

  s.Q_tr = s.A + s.tau * s.kappa * dT_over_T;
  s.W = s.L2 / s.tau - dT_over_T * s.A;
  s.P_he = -s.W / s.tau;
  s.mode = classify_mode(s.Q_tr, s.W);
  if (s.mode == Mode::HeatEngine && s.Q_tr != 0.0) s.eta = -s.W / s.Q_tr;
  if (s.mode == Mode::Refrigerator && s.W != 0.0) s.COP = -s.Q_tr / s.W;
  return s;
}

EnginePerformance engine_performance(const MachineSummary& s) {
  if (s.dT_over_T <= 0.0) throw InvalidBias("engine_performance needs dT/T > 0");
  if (s.A <= 0.0)
    throw WrongOrientation("A <= 0: not in heat-engine orientation (try the refrigerator)");
  EnginePerformance p;
  p.eta_C = s.dT_over_T;
  p.tau_D = s.L2 / (s.dT_over_T * s.A);
  p.tau_kappa = s.A / (s.dT_over_T * s.kappa);
  p.tau_P = 2.0 * p.tau_D;
  p.tau_eta = p.tau_D + std::sqrt(p.tau_D * (p.tau_D + p.tau_kappa));
  p.P_max = 0.25 * s.dT_over_T * s.dT_over_T * s.A * s.A / s.L2;
  p.P_he = s.dT_over_T * s.A * (1.0 - p.tau_D / s.tau) / s.tau;
  p.eta = p.eta_C * (1.0 - p.tau_D / s.tau) / (1.0 + s.tau / p.tau_kappa);
  return p;
}

double engine_power_at(const EnginePerformance& p, double A, double dT_over_T, double tau) {
  return dT_over_T * A * (1.0 - p.tau_D / tau) / tau;
}

double engine_eta_at(const EnginePerformance& p, double tau) {
  return p.eta_C * (1.0 - p.tau_D / tau) / (1.0 + tau / p.tau_kappa);
}

Protocol family_protocol(ProtocolFamily family, const VecX& params, double tau,
                         int spline_knots) {
  // clockwise circulation in the (B_x, B_z) plane pumps heat into the cold
  // (second) bath, i.e. first-quadrant loops have A > 0
  if (family == ProtocolFamily::Ellipse) {
    const double cx = params[0], cz = params[1], a = params[2], b = params[3];
    return Protocol::from_closure(
        2,
        [=](double s) {
          VecX X(2);
          X << cx + a * std::cos(2 * M_PI * s), cz - b * std::sin(2 * M_PI * s);
          return X;
        },
        tau, true,
        [=](double s) {
          VecX d(2);
          d << -2 * M_PI * a * std::sin(2 * M_PI * s), -2 * M_PI * b * std::cos(2 * M_PI * s);
          return d;
        });
  }
  // PolygonSpline: params = (cx, cz, r_0..r_{K-1}), radial knots around the center
  const int K = spline_knots;
  std::vector<double> sgrid(K + 1);
  std::vector<VecX> pts(K + 1);
  for (int k = 0; k <= K; ++k) {
    sgrid[k] = static_cast<double>(k) / K;
    const double ang = -2.0 * M_PI * sgrid[k];
    const double r = params[2 + (k % K)];
    VecX X(2);
    X << params[0] + r * std::cos(ang), params[1] + r * std::sin(ang);
    pts[k] = X;
  }
  return Protocol::from_samples(sgrid, pts, tau, true);
}

namespace {

struct Scorer {
  const FieldMap& map;
  const std::vector<BathSpec>& baths;
  const OptimizeOptions& opts;
  TensorField field;
  int evals = 0;
  std::vector<OptimizeTracePoint>* trace;

  bool feasible(const Protocol& p) const {
    for (int i = 0; i <= 64; ++i) {
      const VecX X = p.point(static_cast<double>(i) / 64);
      if (X.minCoeff() <= opts.margin) return false;
      if (map.field(X).norm() <= opts.margin) return false;
    }
    return true;
  }

  // returns objective (higher is better); nan if infeasible
  double operator()(const VecX& params, Protocol* out_proto = nullptr,
                    MachineSummary* out_sum = nullptr) {
    ++evals;
    Protocol raw = family_protocol(opts.family, params, opts.tau, opts.spline_knots);
    if (!feasible(raw)) return std::numeric_limits<double>::quiet_NaN();
    Protocol p = constant_rate_reparametrize(raw, field);
    const MachineSummary s = machine_summary(p, map, baths, opts.dT_over_T, opts.machine);
    double obj = 0.0;
    switch (opts.objective) {
      case Objective::MaxPumpedHeat:
        obj = s.A;
        break;
      case Objective::MaxPower:
        obj = (s.A > 0.0 && s.L2 > 0.0)
                  ? 0.25 * opts.dT_over_T * opts.dT_over_T * s.A * s.A / s.L2
                  : -1e30;
        break;
      case Objective::MinDissAtFixedA:
        obj = -(s.L2 + 1e3 * std::max(0.0, opts.A_target - s.A));
        break;
    }
    if (trace) trace->push_back({evals, params, obj});
    if (out_proto) *out_proto = std::move(p);
    if (out_sum) *out_sum = s;
    return obj;
  }
};

}  // namespace

OptimizeResult optimize_protocol(const FieldMap& map, const std::vector<BathSpec>& baths,
                                 const OptimizeOptions& opts_in) {
  OptimizeOptions opts = opts_in;
  opts.machine.geo.bias = true;
  const int np = (opts.family == ProtocolFamily::Ellipse) ? 4 : 2 + opts.spline_knots;
  if (opts.box_lo.size() != np || opts.box_hi.size() != np)
    throw ConfigError("optimize_protocol: parameter box does not match the family");

  OptimizeResult res;
  Scorer score{map, baths, opts, make_tensor_field(map, baths, [&] {
                 GeoOptions g = opts.machine.geo;
                 g.bias = true;
                 return g;
               }()),
               0, &res.trace};

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  auto sample_box = [&]() {
    VecX p(np);
    for (int i = 0; i < np; ++i)
      p[i] = opts.box_lo[i] + unif(rng) * (opts.box_hi[i] - opts.box_lo[i]);
    return p;
  };
  auto clamp_box = [&](VecX p) {
    for (int i = 0; i < np; ++i) p[i] = std::clamp(p[i], opts.box_lo[i], opts.box_hi[i]);
    return p;
  };

  VecX best;
  double fbest = -std::numeric_limits<double>::infinity();
  bool any_feasible = false;

  // seed phase: random candidates until one is feasible
  const int nseed = std::max(8, opts.budget / 8);
  for (int i = 0; i < nseed && score.evals < opts.budget; ++i) {
    const VecX p = sample_box();
    const double f = score(p);
    if (std::isnan(f)) continue;
    any_feasible = true;
    if (f > fbest) {
      fbest = f;
      best = p;
    }
  }
  if (!any_feasible) {
    // sweep the box center as a last attempt
    const VecX mid = 0.5 * (opts.box_lo + opts.box_hi);
    const double f = score(mid);
    if (!std::isnan(f)) {
      any_feasible = true;
      fbest = f;
      best = mid;
    }
  }
  if (!any_feasible) throw InfeasibleFamily("no candidate avoids the degenerate region");

  // coordinate descent + Nelder-Mead restarts
  while (score.evals < opts.budget) {
    // one coordinate-descent sweep
    for (int i = 0; i < np && score.evals < opts.budget; ++i) {
      const double span = opts.box_hi[i] - opts.box_lo[i];
      for (double step : {0.25 * span, 0.05 * span}) {
        for (double dir : {+1.0, -1.0}) {
          VecX p = best;
          p[i] = std::clamp(p[i] + dir * step, opts.box_lo[i], opts.box_hi[i]);
          const double f = score(p);
          if (!std::isnan(f) && f > fbest) {
            fbest = f;
            best = p;
          }
          if (score.evals >= opts.budget) break;
        }
      }
    }
    if (score.evals >= opts.budget) break;

    // Nelder-Mead restart around the incumbent
    std::vector<VecX> simplex(np + 1);
    std::vector<double> fs(np + 1);
    simplex[0] = best;
    fs[0] = fbest;
    for (int i = 1; i <= np; ++i) {
      VecX p = best;
      p[i - 1] = std::clamp(p[i - 1] + 0.1 * (opts.box_hi[i - 1] - opts.box_lo[i - 1]) *
                                            (unif(rng) - 0.5) * 2.0,
                            opts.box_lo[i - 1], opts.box_hi[i - 1]);
      simplex[i] = p;
      const double f = score(p);
      fs[i] = std::isnan(f) ? -1e30 : f;
      if (fs[i] > fbest) {
        fbest = fs[i];
        best = p;
      }
      if (score.evals >= opts.budget) break;
    }
    int nm_iters = 0;
    while (score.evals < opts.budget && nm_iters++ < 40) {
      // sort descending (maximize)
      std::vector<int> idx(np + 1);
      for (int i = 0; i <= np; ++i) idx[i] = i;
      std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] > fs[b]; });
      std::vector<VecX> sx(np + 1);
      std::vector<double> sf(np + 1);
      for (int i = 0; i <= np; ++i) {
        sx[i] = simplex[idx[i]];
        sf[i] = fs[idx[i]];
      }
      simplex = sx;
      fs = sf;
      VecX centroid = VecX::Zero(np);
      for (int i = 0; i < np; ++i) centroid += simplex[i];
      centroid /= np;
      auto eval = [&](const VecX& p) {
        const double f = score(clamp_box(p));
        return std::isnan(f) ? -1e30 : f;
      };
      const VecX xr = centroid + (centroid - simplex[np]);
      const double fr = eval(xr);
      if (fr > fbest) {
        fbest = fr;
        best = clamp_box(xr);
      }
      if (fr > fs[0]) {
        const VecX xe = centroid + 2.0 * (centroid - simplex[np]);
        const double fe = eval(xe);
        if (fe > fbest) {
          fbest = fe;
          best = clamp_box(xe);
        }
        if (fe > fr) {
          simplex[np] = clamp_box(xe);
          fs[np] = fe;
        } else {
          simplex[np] = clamp_box(xr);
          fs[np] = fr;
        }
      } else if (fr > fs[np - 1]) {
        simplex[np] = clamp_box(xr);
        fs[np] = fr;
      } else {
        const VecX xc = centroid + 0.5 * (simplex[np] - centroid);
        const double fc = eval(xc);
        if (fc > fbest) {
          fbest = fc;
          best = clamp_box(xc);
        }
        if (fc > fs[np]) {
          simplex[np] = xc;
          fs[np] = fc;
        } else {
          for (int i = 1; i <= np; ++i) {
            simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
            fs[i] = eval(simplex[i]);
            if (fs[i] > fbest) {
              fbest = fs[i];
              best = simplex[i];
            }
            if (score.evals >= opts.budget) break;
          }
        }
      }
      if (score.evals >= opts.budget) break;
    }
  }

  res.budget_exhausted = score.evals >= opts.budget;
  res.params = best;
  Scorer final_score{map, baths, opts, score.field, 0, nullptr};
  Protocol proto = family_protocol(opts.family, best, opts.tau, opts.spline_knots);
  MachineSummary sum;
  final_score(best, &proto, &sum);
  res.protocol = std::move(proto);
  res.summary = sum;
  res.objective = fbest;
  return res;
}

}  // namespace qthermo
