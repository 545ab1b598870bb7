#include "scenario.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <thread>

#include "qthermo/csv.hpp"
#include "qthermo/geometry.hpp"
#include "qthermo/integrate.hpp"
#include "qthermo/transport.hpp"

namespace qthermo::cli {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------- schema ---

int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                std::vector<SchemaIssue>& issues) {
  if (!j.is_object()) {
    issues.push_back({path, "expected an object"});
    return;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (allowed.count(it.key())) continue;
    std::string best;
    int bestd = 1000;
    for (const auto& k : allowed) {
      const int d = levenshtein(it.key(), k);
      if (d < bestd) {
        bestd = d;
        best = k;
      }
    }
    std::string msg = "unknown key '" + it.key() + "'";
    if (bestd <= 3) msg += " (did you mean '" + best + "'?)";
    issues.push_back({path, msg});
  }
}

double need_number(const json& j, const std::string& path, const std::string& key,
                   std::vector<SchemaIssue>& issues, double fallback = 0.0) {
  if (!j.contains(key)) {
    issues.push_back({path, "missing required key '" + key + "'"});
    return fallback;
  }
  if (!j[key].is_number()) {
    issues.push_back({path + "." + key, "expected a number"});
    return fallback;
  }
  return j[key].get<double>();
}

const std::set<std::string> kTopKeys = {
    "command", "field_map", "baths",   "protocol",  "output",   "seed",
    "tolerances", "threads", "pump",   "dissipation", "chern",  "floquet",
    "machine", "transport", "optimize"};
const std::set<std::string> kCommands = {"dissipation", "pump",      "chern",   "floquet",
                                         "machine",     "transport", "optimize"};

FieldMap parse_map(const json& j, std::vector<SchemaIssue>& issues) {
  check_keys(j, "field_map", {"kind", "B0", "delta"}, issues);
  const std::string kind = j.value("kind", "");
  if (kind == "spherical") return FieldMap::spherical();
  if (kind == "planar-xz") return FieldMap::planar_xz();
  if (kind == "synthetic-lattice") {
    const double B0 = need_number(j, "field_map", "B0", issues, 1.0);
    const double delta = need_number(j, "field_map", "delta", issues, 0.5);
    return FieldMap::synthetic_lattice(B0, delta);
  }
  issues.push_back({"field_map.kind",
                    "expected one of spherical | planar-xz | synthetic-lattice, got '" + kind + "'"});
  return FieldMap::planar_xz();
}

BathSpec parse_bath(const json& j, const std::string& path, std::vector<SchemaIssue>& issues) {
  check_keys(j, path,
             {"label", "coupling", "axis", "family", "strength", "exponent", "cutoff_energy",
              "resonance_energy", "width_energy", "temperature_energy"},
             issues);
  BathSpec b;
  b.label = j.value("label", "bath");
  const std::string coupling = j.value("coupling", "axis");
  if (coupling == "axis") b.coupling = CouplingKind::Axis;
  else if (coupling == "transverse") b.coupling = CouplingKind::Transverse;
  else if (coupling == "thermalization") b.coupling = CouplingKind::Thermalization;
  else issues.push_back({path + ".coupling", "expected axis | transverse | thermalization"});
  if (j.contains("axis")) {
    if (!j["axis"].is_array() || j["axis"].size() != 3) {
      issues.push_back({path + ".axis", "expected a 3-vector"});
    } else {
      b.axis = Vec3(j["axis"][0].get<double>(), j["axis"][1].get<double>(),
                    j["axis"][2].get<double>());
    }
  }
  const std::string family = j.value("family", "power-law");
  if (family == "power-law") b.family = SpectralFamily::PowerLaw;
  else if (family == "lorentzian") b.family = SpectralFamily::Lorentzian;
  else issues.push_back({path + ".family", "expected power-law | lorentzian"});

  b.strength = need_number(j, path, "strength", issues, 1.0);
  if (b.strength < 0.0)
    issues.push_back({path + ".strength", "coupling strength must be >= 0"});
  b.exponent = j.value("exponent", 1.0);
  if (b.family == SpectralFamily::PowerLaw && b.exponent <= 0.0)
    issues.push_back({path + ".exponent", "power-law exponent must be > 0"});
  if (j.contains("cutoff_energy")) {
    const double c = j["cutoff_energy"].get<double>();
    b.cutoff = c > 0.0 ? c : std::numeric_limits<double>::infinity();
  }
  b.resonance = j.value("resonance_energy", 1.0);
  b.width = j.value("width_energy", 0.1);
  b.temperature = need_number(j, path, "temperature_energy", issues, 1.0);
  if (b.temperature <= 0.0)
    issues.push_back({path + ".temperature_energy", "temperature must be > 0"});
  return b;
}

Protocol parse_protocol(const json& j, int dim, std::vector<SchemaIssue>& issues) {
  check_keys(j, "protocol",
             {"kind", "center", "radii", "samples", "radius", "corner_epsilon",
              "duration_time", "closed"},
             issues);
  const double tau = need_number(j, "protocol", "duration_time", issues, 1.0);
  if (tau <= 0.0) issues.push_back({"protocol.duration_time", "duration must be > 0"});
  const std::string kind = j.value("kind", "");
  const bool closed = j.value("closed", true);
  auto bad = [&](const std::string& msg) {
    issues.push_back({"protocol", msg});
    return Protocol::from_closure(
        dim, [dim](double) { return VecX::Ones(dim); }, std::max(tau, 1.0), false);
  };
  if (!issues.empty() && tau <= 0.0) return bad("invalid duration");

  if (kind == "ellipse") {
    if (!j.contains("center") || !j.contains("radii")) return bad("ellipse needs center and radii");
    std::vector<double> c = j["center"].get<std::vector<double>>();
    std::vector<double> r = j["radii"].get<std::vector<double>>();
    if (static_cast<int>(c.size()) != dim || static_cast<int>(r.size()) != dim)
      return bad("ellipse center/radii must match the control dimension");
    return Protocol::from_closure(
        dim,
        [c, r, dim](double s) {
          VecX X(dim);
          for (int k = 0; k < dim; ++k)
            X[k] = c[k] + r[k] * ((k % 2 == 0) ? std::cos(2 * M_PI * s) : std::sin(2 * M_PI * s));
          return X;
        },
        tau, true,
        [c, r, dim](double s) {
          VecX d(dim);
          for (int k = 0; k < dim; ++k)
            d[k] = 2 * M_PI * r[k] *
                   ((k % 2 == 0) ? -std::sin(2 * M_PI * s) : std::cos(2 * M_PI * s));
          return d;
        });
  }
  if (kind == "quarter-plane") {
    if (dim != 2) return bad("quarter-plane protocol needs a 2d control space");
    const double R = need_number(j, "protocol", "radius", issues, 3.0);
    const double eps = j.value("corner_epsilon", 1e-3);
    // (eps,eps) -> (eps,R) -> arc -> (R,eps) -> back; piecewise smooth
    return Protocol::from_closure(
        2,
        [R, eps](double s) {
          VecX X(2);
          if (s < 1.0 / 3) {
            const double u = 3.0 * s;
            X << eps, eps + (R - eps) * u;
          } else if (s < 2.0 / 3) {
            const double u = 3.0 * (s - 1.0 / 3);
            const double th = u * M_PI / 2;  // from +z axis to +x axis
            X << eps + (R - eps) * std::sin(th), eps + (R - eps) * std::cos(th);
          } else {
            const double u = 3.0 * (s - 2.0 / 3);
            X << eps + (R - eps) * (1.0 - u), eps;
          }
          return X;
        },
        tau, true);
  }
  if (kind == "spline") {
    if (!j.contains("samples") || !j["samples"].is_array() || j["samples"].size() < 3)
      return bad("spline needs a samples array [[s, X...], ...]");
    std::vector<double> s;
    std::vector<VecX> pts;
    for (const auto& row : j["samples"]) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim + 1)
        return bad("each spline sample must be [s, X_1.." + std::to_string(dim) + "]");
      s.push_back(row[0].get<double>());
      VecX X(dim);
      for (int k = 0; k < dim; ++k) X[k] = row[k + 1].get<double>();
      pts.push_back(X);
    }
    return Protocol::from_samples(s, pts, tau, closed);
  }
  return bad("protocol.kind must be ellipse | quarter-plane | spline");
}

}  // namespace

std::vector<SchemaIssue> validate_config(const json& j) {
  std::vector<SchemaIssue> issues;
  check_keys(j, "(top level)", kTopKeys, issues);
  const std::string cmd = j.value("command", "");
  if (!kCommands.count(cmd))
    issues.push_back({"command", "expected one of dissipation | pump | chern | floquet | "
                                 "machine | transport | optimize"});

  if (j.contains("field_map")) parse_map(j["field_map"], issues);
  else if (cmd != "optimize") issues.push_back({"field_map", "missing section"});

  if (j.contains("baths")) {
    if (!j["baths"].is_array()) {
      issues.push_back({"baths", "expected an array"});
    } else {
      int i = 0;
      for (const auto& b : j["baths"]) parse_bath(b, "baths[" + std::to_string(i++) + "]", issues);
    }
  } else if (cmd == "pump" || cmd == "machine" || cmd == "transport" || cmd == "dissipation") {
    issues.push_back({"baths", "missing section"});
  }

  if (j.contains("output")) check_keys(j["output"], "output", {"dir"}, issues);
  if (j.contains("tolerances")) check_keys(j["tolerances"], "tolerances", {"rel"}, issues);

  if (j.contains("protocol")) {
    int dim = 2;
    if (j.contains("field_map") && j["field_map"].value("kind", "") == "spherical") dim = 3;
    std::vector<SchemaIssue> proto_issues;
    try {
      parse_protocol(j["protocol"], dim, proto_issues);
    } catch (const std::exception& e) {
      proto_issues.push_back({"protocol", e.what()});
    }
    issues.insert(issues.end(), proto_issues.begin(), proto_issues.end());
  } else if (cmd == "pump" || cmd == "machine" || cmd == "dissipation") {
    issues.push_back({"protocol", "missing section"});
  }

  // per-command sections
  if (j.contains("pump")) check_keys(j["pump"], "pump", {"stokes", "cold_index"}, issues);
  if (j.contains("dissipation"))
    check_keys(j["dissipation"], "dissipation", {"dT_over_T", "response", "grid"}, issues);
  if (j.contains("chern"))
    check_keys(j["chern"], "chern", {"resolution", "deltas", "band"}, issues);
  if (j.contains("floquet"))
    check_keys(j["floquet"], "floquet",
               {"w1", "ratio", "w2", "horizon_periods", "phases", "drift_tol"}, issues);
  if (j.contains("machine")) check_keys(j["machine"], "machine", {"dT_over_T"}, issues);
  if (j.contains("transport"))
    check_keys(j["transport"], "transport", {"T_values", "dT_values", "rect_dT"}, issues);
  if (j.contains("optimize"))
    check_keys(j["optimize"], "optimize",
               {"family", "objective", "budget", "box_lo", "box_hi", "tau", "dT_over_T",
                "A_target", "spline_knots"},
               issues);
  return issues;
}

Scenario parse_scenario(const json& j, std::vector<SchemaIssue>* issues_out) {
  std::vector<SchemaIssue> issues = validate_config(j);
  Scenario sc;
  sc.command = j.value("command", "");
  sc.raw = j;
  if (j.contains("field_map")) sc.map = parse_map(j["field_map"], issues);
  if (j.contains("baths"))
    for (const auto& b : j["baths"]) sc.baths.push_back(parse_bath(b, "baths", issues));
  if (j.contains("protocol")) {
    std::vector<SchemaIssue> pi;
    try {
      sc.protocol = parse_protocol(j["protocol"], sc.map.dim(), pi);
    } catch (const std::exception& e) {
      issues.push_back({"protocol", e.what()});
    }
  }
  if (j.contains("output")) sc.out_dir = j["output"].value("dir", "out");
  sc.seed = j.value("seed", 1ull);
  if (j.contains("tolerances")) sc.tolerance = j["tolerances"].value("rel", 1e-6);
  sc.threads = j.value("threads", 1);
  if (issues_out) *issues_out = issues;
  else if (!issues.empty()) {
    std::string msg;
    for (const auto& i : issues) msg += i.path + ": " + i.message + "\n";
    throw ConfigError(msg);
  }
  return sc;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, threads);
  if (threads == 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < std::min(threads, n); ++t) {
    pool.emplace_back([&] {
      int i;
      while ((i = next.fetch_add(1)) < n) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

struct RunContext {
  Scenario sc;
  std::filesystem::path out;
  std::vector<std::string> outputs;

  std::ofstream open_csv(const std::string& name) {
    std::filesystem::create_directories(out);
    outputs.push_back(name);
    std::ofstream os(out / name, std::ios::binary);
    if (!os) throw ConfigError("cannot open output file " + (out / name).string());
    return os;
  }
};

GeoOptions geo_options_from(const json& section) {
  GeoOptions g;
  if (section.contains("response") && section["response"] == "dissipative")
    g.mode = ResponseMode::Dissipative;
  return g;
}

void cmd_dissipation(RunContext& ctx) {
  const json sec = ctx.sc.raw.value("dissipation", json::object());
  const double x = sec.value("dT_over_T", 0.0);
  GeoOptions geo = geo_options_from(sec);
  geo.bias = (x != 0.0);
  const TensorField field = make_tensor_field(ctx.sc.map, ctx.sc.baths, geo);
  WorkOptions wopts;
  wopts.quad.doubling_tol = ctx.sc.tolerance;

  const Protocol& proto = *ctx.sc.protocol;
  const double W = dissipated_work(proto, field, x, wopts);
  const double L = thermodynamic_length(proto, field, wopts);
  const auto bound = dissipation_bound_check(proto, field, 1e-6, wopts);

  auto os = ctx.open_csv("dissipation.csv");
  CsvWriter w(os);
  w.row({"W_diss", "length", "TSigma", "bound_L2_over_tau", "saturated"});
  w.row({W, L, bound.TSigma, bound.bound, static_cast<long long>(bound.saturated)});

  if (sec.contains("grid")) {
    const auto axes = sec["grid"]["axes"].get<std::vector<std::vector<double>>>();
    if (axes.size() != static_cast<size_t>(ctx.sc.map.dim()))
      throw ConfigError("dissipation.grid.axes must match the control dimension");
    std::vector<int> ns;
    for (const auto& a : axes) ns.push_back(static_cast<int>(a[2]));
    int total = 1;
    for (int n : ns) total *= n;
    std::vector<std::vector<CsvCell>> rows(total);
    parallel_for(total, ctx.sc.threads, [&](int idx) {
      VecX X(ctx.sc.map.dim());
      int rem = idx;
      for (int d = ctx.sc.map.dim() - 1; d >= 0; --d) {
        const int i = rem % ns[d];
        rem /= ns[d];
        X[d] = axes[d][0] + (axes[d][1] - axes[d][0]) * (ns[d] == 1 ? 0.0 : double(i) / (ns[d] - 1));
      }
      const GeoTensor g = field(X);
      std::vector<CsvCell> row;
      for (int d = 0; d < X.size(); ++d) row.push_back(X[d]);
      for (int a = 0; a < g.lambda.rows(); ++a)
        for (int b = 0; b < g.lambda.cols(); ++b) row.push_back(g.lambda(a, b));
      rows[idx] = std::move(row);
    });
    auto gs = ctx.open_csv("tensor_grid.csv");
    CsvWriter gw(gs);
    for (const auto& r : rows) gw.row(r);
  }
}

void cmd_pump(RunContext& ctx) {
  const json sec = ctx.sc.raw.value("pump", json::object());
  GeoOptions geo;
  geo.bias = true;
  geo.cold_index = sec.value("cold_index", 1);
  const PumpField field = make_pump_field(ctx.sc.map, ctx.sc.baths, geo);
  PumpedHeatOptions popts;
  popts.quad.doubling_tol = ctx.sc.tolerance;
  popts.stokes_check = sec.value("stokes", true);
  const auto Q = pumped_heat(*ctx.sc.protocol, field, popts);

  GeoOptions geo_nd;  // zero-bias tensor for the dissipation column
  const TensorField tf = make_tensor_field(ctx.sc.map, ctx.sc.baths, geo_nd);
  WorkOptions wopts;
  wopts.quad.doubling_tol = ctx.sc.tolerance;
  const double W = dissipated_work(*ctx.sc.protocol, tf, 0.0, wopts);

  auto os = ctx.open_csv("pump.csv");
  CsvWriter w(os);
  w.row({"Q_pump", "W_diss", "stokes_flux", "stokes_residual"});
  w.row({Q.Q, W, Q.stokes, Q.stokes_residual});
}

void cmd_chern(RunContext& ctx) {
  const json sec = ctx.sc.raw.value("chern", json::object());
  const int res = sec.value("resolution", 200);
  const Band band = sec.value("band", "ground") == std::string("excited") ? Band::Excited
                                                                          : Band::Ground;
  std::vector<double> deltas;
  if (sec.contains("deltas")) deltas = sec["deltas"].get<std::vector<double>>();
  else deltas = {ctx.sc.map.lattice_delta()};
  const double B0 =
      ctx.sc.map.kind() == FieldMap::Kind::SyntheticLattice ? ctx.sc.map.lattice_B0() : 1.0;

  std::vector<ChernResult> results(deltas.size());
  parallel_for(static_cast<int>(deltas.size()), ctx.sc.threads, [&](int i) {
    results[i] = chern_number(FieldMap::synthetic_lattice(B0, deltas[i]), res, band);
  });
  auto os = ctx.open_csv("chern.csv");
  CsvWriter w(os);
  w.row({"delta", "C", "dirac_flag", "excluded_plaquettes"});
  for (size_t i = 0; i < deltas.size(); ++i)
    w.row({deltas[i], results[i].C, static_cast<long long>(results[i].dirac_flag),
           static_cast<long long>(results[i].excluded_plaquettes)});
}

void cmd_floquet(RunContext& ctx) {
  const json sec = ctx.sc.raw.value("floquet", json::object());
  const double w1 = sec.value("w1", 0.01);
  double w2 = sec.value("w2", 0.0);
  if (w2 == 0.0) {
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    w2 = sec.value("ratio", json("golden")) == json("golden")
             ? w1 * golden
             : w1 * sec["ratio"].get<double>();
  }
  const double periods = sec.value("horizon_periods", 400.0);
  const double horizon = periods * 2.0 * M_PI / w1;
  FloquetOptions fopts;
  fopts.drift_tol = sec.value("drift_tol", 0.01);
  if (sec.contains("phases")) {
    fopts.phase_grid.clear();
    for (const auto& p : sec["phases"]) fopts.phase_grid.emplace_back(p[0], p[1]);
  }
  const auto res = floquet_pump(ctx.sc.map, w1, w2, horizon, fopts);

  auto os = ctx.open_csv("floquet.csv");
  CsvWriter w(os);
  w.row({"w1", "w2", "horizon", "chern_ratio", "Pbar", "horizon_ok", "commensurate_warning"});
  w.row({w1, w2, horizon, res.ratio, res.Pbar, static_cast<long long>(res.horizon_ok),
         static_cast<long long>(res.commensurate_warning)});
  auto ts = ctx.open_csv("floquet_trace.csv");
  CsvWriter tw(ts);
  tw.row({"t", "running_ratio"});
  for (const auto& [t, r] : res.trace) tw.row({t, r});
}

void cmd_machine(RunContext& ctx) {
  const json sec = ctx.sc.raw.value("machine", json::object());
  const double x = sec.value("dT_over_T", 0.05);
  MachineOptions mo;
  mo.work.quad.doubling_tol = ctx.sc.tolerance;
  const MachineSummary s = machine_summary(*ctx.sc.protocol, ctx.sc.map, ctx.sc.baths, x, mo);
  auto os = ctx.open_csv("machine.csv");
  CsvWriter w(os);
  w.row({"A", "L2", "kappa_avg", "Q_tr", "W", "P_he", "mode", "eta", "COP", "tau_D", "tau_kappa",
         "tau_P", "tau_eta", "P_max"});
  std::vector<CsvCell> row{s.A, s.L2, s.kappa, s.Q_tr, s.W, s.P_he, to_string(s.mode), s.eta,
                           s.COP};
  if (s.A > 0.0 && x > 0.0) {
    const auto p = engine_performance(s);
    row.insert(row.end(), {p.tau_D, p.tau_kappa, p.tau_P, p.tau_eta, p.P_max});
  } else {
    row.insert(row.end(), {0.0, 0.0, 0.0, 0.0, 0.0});
  }
  w.row(row);
}

void cmd_transport(RunContext& ctx) {
  const json sec = ctx.sc.raw.value("transport", json::object());
  if (ctx.sc.baths.size() != 2) throw ConfigError("transport needs exactly two baths");
  std::vector<double> Ts = sec.value("T_values", std::vector<double>{1.0});
  std::vector<double> dTs = sec.value("dT_values", std::vector<double>{0.1});
  const VecX X = ctx.sc.protocol ? ctx.sc.protocol->point(0.0)
                                 : [&] {
                                     VecX x0(ctx.sc.map.dim());
                                     x0.setOnes();
                                     return x0;
                                   }();

  const int total = static_cast<int>(Ts.size() * dTs.size());
  std::vector<std::vector<CsvCell>> rows(total);
  parallel_for(total, ctx.sc.threads, [&](int idx) {
    const double T = Ts[idx / dTs.size()];
    const double dT = dTs[idx % dTs.size()];
    BathSpec bl = ctx.sc.baths[0], br = ctx.sc.baths[1];
    bl.temperature = T + 0.5 * dT;
    br.temperature = T - 0.5 * dT;
    const auto pt = steady_current(ctx.sc.map, X, bl, br);
    const auto G = thermal_conductance(ctx.sc.map, X, ctx.sc.baths[0], ctx.sc.baths[1], T);
    double R = 0.0;
    if (dT != 0.0) {
      try {
        R = rectification(ctx.sc.map, X, ctx.sc.baths[0], ctx.sc.baths[1], T, dT);
      } catch (const ZeroCurrent&) {
        R = 0.0;
      }
    }
    rows[idx] = {T, dT, pt.J_l, pt.J_r, G.G_th, R};
  });
  auto os = ctx.open_csv("transport.csv");
  CsvWriter w(os);
  w.row({"T", "dT", "J_l", "J_r", "G_th", "R"});
  for (const auto& r : rows) w.row(r);
}

void cmd_optimize(RunContext& ctx) {
  const json sec = ctx.sc.raw.value("optimize", json::object());
  OptimizeOptions oo;
  const std::string fam = sec.value("family", "ellipse");
  oo.family = fam == "polygon-spline" ? ProtocolFamily::PolygonSpline : ProtocolFamily::Ellipse;
  const std::string obj = sec.value("objective", "max-power");
  if (obj == "max-power") oo.objective = Objective::MaxPower;
  else if (obj == "max-pumped-heat") oo.objective = Objective::MaxPumpedHeat;
  else if (obj == "min-diss-at-fixed-A") oo.objective = Objective::MinDissAtFixedA;
  else throw ConfigError("optimize.objective must be max-power | max-pumped-heat | min-diss-at-fixed-A");
  oo.budget = sec.value("budget", 200);
  oo.seed = ctx.sc.seed;
  oo.tau = sec.value("tau", 100.0);
  oo.dT_over_T = sec.value("dT_over_T", 0.05);
  oo.A_target = sec.value("A_target", 0.0);
  oo.spline_knots = sec.value("spline_knots", 6);
  const auto lo = sec.value("box_lo", std::vector<double>{}),
             hi = sec.value("box_hi", std::vector<double>{});
  oo.box_lo = Eigen::Map<const VecX>(lo.data(), lo.size());
  oo.box_hi = Eigen::Map<const VecX>(hi.data(), hi.size());
  oo.machine.work.quad.doubling_tol = std::max(ctx.sc.tolerance, 1e-5);

  const auto res = optimize_protocol(ctx.sc.map, ctx.sc.baths, oo);

  auto ts = ctx.open_csv("optimize_trace.csv");
  CsvWriter tw(ts);
  {
    std::vector<CsvCell> hdr{"eval"};
    for (int i = 0; i < res.params.size(); ++i) hdr.push_back("p" + std::to_string(i));
    hdr.push_back("objective");
    tw.row(hdr);
    for (const auto& t : res.trace) {
      std::vector<CsvCell> row{static_cast<long long>(t.eval)};
      for (int i = 0; i < t.params.size(); ++i) row.push_back(t.params[i]);
      row.push_back(t.objective);
      tw.row(row);
    }
  }
  auto ss = ctx.open_csv("optimize_summary.csv");
  CsvWriter sw(ss);
  {
    std::vector<CsvCell> hdr{"objective"};
    for (int i = 0; i < res.params.size(); ++i) hdr.push_back("p" + std::to_string(i));
    hdr.insert(hdr.end(), {"A", "L2", "Q_tr", "W", "mode", "budget_exhausted"});
    sw.row(hdr);
    std::vector<CsvCell> row{res.objective};
    for (int i = 0; i < res.params.size(); ++i) row.push_back(res.params[i]);
    row.insert(row.end(), {res.summary.A, res.summary.L2, res.summary.Q_tr, res.summary.W,
                           to_string(res.summary.mode),
                           static_cast<long long>(res.budget_exhausted)});
    sw.row(row);
  }
  // incumbent protocol as a spline table consumable by `protocol.kind = spline`
  auto ps = ctx.open_csv("optimize_protocol.csv");
  CsvWriter pw(ps);
  {
    std::vector<CsvCell> hdr{"s"};
    for (int d = 0; d < ctx.sc.map.dim(); ++d) hdr.push_back("X" + std::to_string(d + 1));
    hdr.push_back("sigma");
    pw.row(hdr);
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
      const double s = static_cast<double>(i) / n;
      const VecX X = res.protocol.point(s);
      std::vector<CsvCell> row{s};
      for (int d = 0; d < X.size(); ++d) row.push_back(X[d]);
      row.push_back(res.protocol.speed(s));
      pw.row(row);
    }
  }
}

}  // namespace

int validate_scenario(const std::filesystem::path& config_path) {
  std::ifstream is(config_path);
  if (!is) {
    std::cerr << "cannot read config " << config_path << "\n";
    return 2;
  }
  json j;
  try {
    is >> j;
  } catch (const std::exception& e) {
    std::cerr << "JSON parse error: " << e.what() << "\n";
    return 2;
  }
  const auto issues = validate_config(j);
  if (issues.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  for (const auto& i : issues) std::cout << i.path << ": " << i.message << "\n";
  return 2;
}

int run_scenario(const RunOptions& opts) {
  std::ifstream is(opts.config_path);
  if (!is) {
    std::cerr << "cannot read config " << opts.config_path << "\n";
    return 2;
  }
  std::string bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  json j;
  try {
    j = json::parse(bytes);
  } catch (const std::exception& e) {
    std::cerr << "JSON parse error: " << e.what() << "\n";
    return 2;
  }
  Scenario sc;
  try {
    sc = parse_scenario(j);
  } catch (const std::exception& e) {
    std::cerr << "config error:\n" << e.what();
    return 2;
  }
  if (!opts.out_dir_override.empty()) sc.out_dir = opts.out_dir_override;
  if (opts.seed_override) sc.seed = *opts.seed_override;
  if (opts.tolerance_override) sc.tolerance = *opts.tolerance_override;
  if (opts.threads > 0) sc.threads = opts.threads;
  else if (const char* env = std::getenv("QTHERMO_THREADS")) sc.threads = std::atoi(env);

  RunContext ctx{std::move(sc), {}, {}};
  ctx.out = ctx.sc.out_dir;

  json manifest;
  manifest["config_hash"] = fnv1a(bytes);
  manifest["version"] = QTHERMO_VERSION;
  manifest["seed"] = ctx.sc.seed;
  manifest["command"] = ctx.sc.command;
  manifest["threads"] = ctx.sc.threads;

  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (ctx.sc.command == "dissipation") cmd_dissipation(ctx);
    else if (ctx.sc.command == "pump") cmd_pump(ctx);
    else if (ctx.sc.command == "chern") cmd_chern(ctx);
    else if (ctx.sc.command == "floquet") cmd_floquet(ctx);
    else if (ctx.sc.command == "machine") cmd_machine(ctx);
    else if (ctx.sc.command == "transport") cmd_transport(ctx);
    else if (ctx.sc.command == "optimize") cmd_optimize(ctx);
    else {
      std::cerr << "unknown command " << ctx.sc.command << "\n";
      return 2;
    }
  } catch (const Error& e) {
    manifest["error"] = {{"module_error", e.code()}, {"message", e.what()}};
    code = 3;
  } catch (const std::exception& e) {
    manifest["error"] = {{"module_error", "Unexpected"}, {"message", e.what()}};
    code = 3;
  }
  const auto t1 = std::chrono::steady_clock::now();
  manifest["wall_time_s"] = std::chrono::duration<double>(t1 - t0).count();
  manifest["outputs"] = ctx.outputs;

  std::filesystem::create_directories(ctx.out);
  std::ofstream ms(ctx.out / "run_manifest.json", std::ios::binary);
  ms << manifest.dump(2) << "\n";
  if (code != 0) std::cerr << "numerical failure: " << manifest["error"].dump() << "\n";
  return code;
}

}  // namespace qthermo::cli
