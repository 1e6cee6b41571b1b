#include "ptori/run.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "ptori/applications.hpp"
#include "ptori/errors.hpp"
#include "ptori/flow_solver.hpp"
#include "ptori/helicoure.hpp"
#include "ptori/map_solver.hpp"
#include "ptori/operators.hpp"

namespace ptori {

namespace fs = std::filesystem;

namespace {

// ---------------------------------------------------------------------------
// config access

const json& section(const json& cfg, const char* key) {
  static const json empty = json::object();
  if (!cfg.contains(key) || cfg[key].is_null()) return empty;
  if (!cfg[key].is_object()) throw ConfigError(std::string("'") + key + "' must be an object");
  return cfg[key];
}

double num(const json& j, const char* key, double def) {
  if (!j.contains(key) || j[key].is_null()) return def;
  return to_double(parse_real(j[key]));
}

int integer(const json& j, const char* key, int def) {
  if (!j.contains(key) || j[key].is_null()) return def;
  if (!j[key].is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return j[key].get<int>();
}

Real real_or(const json& j, const char* key, Real def) {
  if (!j.contains(key) || j[key].is_null()) return def;
  return parse_real(j[key]);
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0)) throw ConfigError(what + " must be positive");
}

struct Common {
  int n_target = 6;
  Branch branch = Branch::stable;
  int max_mode = 32;
  int max_degree = 20;
  double coefficient_tol = 1e-10;
  double diophantine_floor = 1e-12;
  double inverse_tol = 1e-6;
  json grid = json::object();
};

Common read_common(const json& cfg, int default_order, int default_modes) {
  Common c;
  c.n_target = integer(cfg, "n_target", default_order);
  if (c.n_target < 2) throw ConfigError("n_target must be at least 2");
  if (cfg.contains("branch")) c.branch = parse_branch(cfg["branch"].get<std::string>());
  const json& t = section(cfg, "truncation");
  c.max_mode = integer(t, "max_mode", default_modes);
  c.max_degree = integer(t, "max_degree", 20);
  if (c.max_mode < 0 || c.max_degree < 2) throw ConfigError("truncation: max_mode >= 0 and max_degree >= 2 required");
  const json& tol = section(cfg, "tolerances");
  c.coefficient_tol = num(tol, "coefficient", 1e-10);
  c.diophantine_floor = num(tol, "diophantine_floor", 1e-12);
  c.inverse_tol = num(tol, "inverse", 1e-6);
  require_positive(c.coefficient_tol, "tolerances.coefficient");
  require_positive(c.diophantine_floor, "tolerances.diophantine_floor");
  require_positive(c.inverse_tol, "tolerances.inverse");
  c.grid = section(cfg, "grid");
  return c;
}

ResidualGrid read_grid(const json& g, int torus_dim) {
  ResidualGrid grid = default_residual_grid(torus_dim);
  const double lo = num(g, "u_min", 1e-3), hi = num(g, "u_max", 1e-2);
  const int pts = integer(g, "u_points", 12);
  if (!(lo > 0) || !(hi > lo) || pts < 2) throw ConfigError("grid: need 0 < u_min < u_max and u_points >= 2");
  grid.u = log_grid(lo, hi, pts);
  grid.fit_lo = lo;
  grid.fit_hi = hi;
  if (g.contains("theta_per_axis")) {
    const int per = integer(g, "theta_per_axis", 8);
    if (per < 1) throw ConfigError("grid.theta_per_axis must be positive");
    grid.theta = theta_grid(torus_dim, per);
  }
  return grid;
}

// reference problem: c = 1 + 0.1 cos, a_2 = 6 + cos, d_1 = 1, golden mean
json default_map_block() {
  return json::parse(R"J({
    "k": 2, "p": 1, "omega": ["golden"],
    "c": {"const": 1, "cos": [{"k": [1], "amp": 0.1}]},
    "P": [{"l": 2, "m": 0, "series": {"const": 6, "cos": [{"k": [1], "amp": 1}]}}],
    "Q": [[{"l": 1, "m": 0, "series": 1}]]
  })J");
}

// same data on T^2 with a second frequency nu = sqrt 2
json default_field_block() {
  return json::parse(R"J({
    "k": 2, "p": 1, "omega": ["golden"], "nu": ["sqrt(2)"],
    "c": {"const": 1, "cos": [{"k": [1, 0], "amp": 0.1}]},
    "P": [{"l": 2, "m": 0, "series": {"const": 6, "cos": [{"k": [1, 0], "amp": 1}, {"k": [0, 1], "amp": 0.5}]}}],
    "Q": [[{"l": 1, "m": 0, "series": 1}]]
  })J");
}

json default_helicoure_block() {
  return json::parse(R"J({
    "omega": ["golden"],
    "x": [{"l": 0, "m": 1, "series": 2}, {"l": 3, "m": 0, "series": 0.2}],
    "y": [{"l": 1, "m": 1, "series": -1},
          {"l": 0, "m": 2, "series": {"const": 0, "cos": [{"k": [1], "amp": 0.4}]}},
          {"l": 4, "m": 0, "series": 0.1}],
    "theta": [[{"l": 0, "m": 1, "series": 3},
               {"l": 1, "m": 1, "series": {"const": 0, "cos": [{"k": [1], "amp": 0.5}]}}]]
  })J");
}

Frequency read_frequency(const json& b, const Common& c, bool with_nu) {
  Frequency f;
  f.omega = parse_real_vector(b.contains("omega") ? b["omega"] : json::array());
  if (with_nu) f.nu = parse_real_vector(b.contains("nu") ? b["nu"] : json::array());
  f.diophantine_floor = Real(c.diophantine_floor);
  return f;
}

struct ReducedBlock {
  FourierSeries c;
  TFPoly P;
  std::vector<TFPoly> Q;
  int k = 2, p = 1;
  Frequency freq;
};

ReducedBlock read_reduced(const json& b, const Common& c, bool flow) {
  ReducedBlock r;
  r.k = integer(b, "k", 2);
  r.p = integer(b, "p", 1);
  r.freq = read_frequency(b, c, flow);
  const int dim = r.freq.torus_dim();
  if (!b.contains("c")) throw ConfigError("problem block needs 'c'");
  r.c = fourier_from_json(b["c"], dim, c.max_mode);
  r.P = tfpoly_from_json(b.contains("P") ? b["P"] : json(), dim, c.max_mode, c.max_degree);
  const json Q = b.contains("Q") ? b["Q"] : json::array();
  if (!Q.is_array() || static_cast<int>(Q.size()) != r.freq.d())
    throw ConfigError("'Q' must hold one polynomial per component of omega");
  for (const auto& q : Q) r.Q.push_back(tfpoly_from_json(q, dim, c.max_mode, c.max_degree));
  return r;
}

ReducedMap read_map(const json& cfg, const Common& c) {
  const json b = cfg.contains("map") ? cfg["map"] : default_map_block();
  const ReducedBlock r = read_reduced(b, c, false);
  return make_reduced_map(r.c, r.P, r.Q, r.k, r.p, r.freq);
}

ReducedField read_field(const json& cfg, const Common& c) {
  const json b = cfg.contains("field") ? cfg["field"] : default_field_block();
  const ReducedBlock r = read_reduced(b, c, true);
  return make_reduced_field(r.c, r.P, r.Q, r.k, r.p, r.freq);
}

HelicoureField read_helicoure(const json& cfg, const Common& c) {
  const json b = cfg.contains("helicoure") ? cfg["helicoure"] : default_helicoure_block();
  HelicoureField X;
  X.freq = read_frequency(b, c, true);
  const int dim = X.freq.torus_dim();
  X.data.x = tfpoly_from_json(b.contains("x") ? b["x"] : json(), dim, c.max_mode, c.max_degree);
  X.data.y = tfpoly_from_json(b.contains("y") ? b["y"] : json(), dim, c.max_mode, c.max_degree);
  const json th = b.contains("theta") ? b["theta"] : json::array();
  if (!th.is_array() || static_cast<int>(th.size()) != X.freq.d())
    throw ConfigError("'theta' must hold one polynomial per component of omega");
  for (const auto& t : th) X.data.theta.push_back(tfpoly_from_json(t, dim, c.max_mode, c.max_degree));
  return X;
}

OscillatorParams read_oscillator(const json& cfg, const Common& c) {
  const json& b = section(cfg, "oscillator");
  OscillatorParams p = default_oscillator(c.max_mode);
  p.c = real_or(b, "c", p.c);
  p.n_pot = integer(b, "n_pot", p.n_pot);
  p.alpha = real_or(b, "alpha", p.alpha);
  if (b.contains("nu")) p.nu = parse_real_vector(b["nu"]);
  if (b.contains("g")) p.g = fourier_from_json(b["g"], static_cast<int>(p.nu.size()), c.max_mode);
  if (p.n_pot < 2) throw ConfigError("oscillator.n_pot must be at least 2");
  return p;
}

HeCuParams read_hecu(const json& cfg, const Common& c) {
  const json& b = section(cfg, "hecu");
  HeCuParams p = default_hecu(c.max_mode);
  p.D = real_or(b, "D", p.D);
  p.alpha_morse = real_or(b, "alpha", p.alpha_morse);
  p.m = real_or(b, "m", p.m);
  p.h = real_or(b, "h", p.h);
  if (b.contains("g_surface")) p.g_surface = fourier_from_json(b["g_surface"], 1, c.max_mode);
  return p;
}

// ---------------------------------------------------------------------------
// coefficient oracles

CoefficientCheck make_check(const std::string& name, Real computed, Real expected, double tol) {
  CoefficientCheck c;
  c.name = name;
  c.computed = to_double(computed);
  c.expected = to_double(expected);
  const Real scale = qabs(expected) > 0 ? qabs(expected) : Real(1);
  c.rel_error = to_double(qabs(computed - expected) / scale);
  c.pass = c.rel_error <= tol;
  return c;
}

// lowest-order coefficients of the map and flow hierarchies
std::vector<CoefficientCheck> leading_checks(const ManifoldPair& pair, const TaylorFourierData& D, int k, int p,
                                             double tol) {
  const Real cb = average(D.x.get(0, 1)), ab = average(D.y.get(k, 0));
  const Real sgn = pair.branch == Branch::stable ? -1 : 1;
  std::vector<CoefficientCheck> out;
  out.push_back(make_check("Ky_" + std::to_string(k + 1), average(pair.Ky.coeff(k + 1)),
                           sgn * qsqrt(2 * ab / (cb * Real(k + 1))), tol));
  out.push_back(make_check((pair.setting == Setting::map ? "R_" : "Y_") + std::to_string(k), pair.R.coeff(k),
                           sgn * qsqrt(cb * ab / (2 * Real(k + 1))), tol));
  for (std::size_t i = 0; i < pair.Ktheta.size(); ++i) {
    const Real db = average(D.theta[i].get(p, 0));
    out.push_back(make_check("Ktheta" + std::to_string(i) + "_" + std::to_string(2 * p - k + 1),
                             average(pair.Ktheta[i].coeff(2 * p - k + 1)),
                             sgn * db / Real(2 * p - k + 1) * qsqrt(2 * Real(k + 1) / (cb * ab)), tol));
  }
  return out;
}

std::vector<CoefficientCheck> helicoure_checks(const FlowPair& pair, const HelicoureField& X, double tol) {
  const Real c = average(X.c()), b = average(X.b());
  const Real Y2 = b / 2, K2 = Y2 / c;
  std::vector<CoefficientCheck> out{make_check("Y_2", pair.R.coeff(2), Y2, tol),
                                    make_check("Ky_2", average(pair.Ky.coeff(2)), K2, tol)};
  for (std::size_t i = 0; i < pair.Ktheta.size(); ++i)
    out.push_back(make_check("Ktheta" + std::to_string(i) + "_1", average(pair.Ktheta[i].coeff(1)),
                             (average(X.d(static_cast<int>(i))) * K2 + average(X.e20(static_cast<int>(i)))) / Y2, tol));
  return out;
}

// ---------------------------------------------------------------------------
// artifacts

void write_text(const fs::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + p.string());
  f << s;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::string summary_text(const json& s) {
  std::ostringstream os;
  os << "command: " << s.value("command", "") << "\n";
  if (s.contains("branch")) os << "branch: " << s["branch"].get<std::string>() << "\n";
  if (s.contains("achieved_n")) os << "order n: " << s["achieved_n"].get<int>() << "\n";
  if (s.contains("residual")) {
    const auto& r = s["residual"];
    os << "residual slopes (x, y, theta): ";
    for (int i = 0; i < 3; ++i) os << (r["slopes"][i].is_null() ? "nan" : fmt(r["slopes"][i].get<double>())) << " ";
    os << " expected: " << r["expected_orders"][0] << " " << r["expected_orders"][1] << " "
       << r["expected_orders"][2] << "\n";
  }
  if (s.contains("coefficient_checks"))
    for (const auto& c : s["coefficient_checks"])
      os << "check " << c["name"].get<std::string>() << ": computed " << fmt(c["computed"].get<double>())
         << " expected " << fmt(c["expected"].get<double>()) << " rel err " << fmt(c["rel_error"].get<double>())
         << (c["pass"].get<bool>() ? " PASS" : " FAIL") << "\n";
  if (s.contains("operators")) {
    const auto& o = s["operators"];
    if (o.contains("sector"))
      os << "sector bound: " << (o["sector"]["ok"].get<bool>() ? "holds" : "violated") << ", min slack "
         << fmt(o["sector"]["min_slack"].get<double>()) << "\n";
    if (o.contains("orbit_inverse"))
      os << "orbit-sum inverse: max rel defect " << fmt(o["orbit_inverse"]["max_rel_defect"].get<double>()) << "\n";
    if (o.contains("flow_inverse"))
      os << "flow inverse: max rel defect " << fmt(o["flow_inverse"]["max_rel_defect"].get<double>())
         << ", analytic oracle rel err " << fmt(o["flow_inverse"]["oracle_rel_error"].get<double>()) << "\n";
    if (o.contains("contraction")) {
      const auto& c = o["contraction"];
      os << "contraction probe: max factor " << fmt(c["max_factor"].get<double>()) << ", residual monotone "
         << (c["residual_monotone"].get<bool>() ? "yes" : "no") << " (" << c["note"].get<std::string>() << ")\n";
    }
  }
  if (s.contains("notes"))
    for (const auto& n : s["notes"]) os << "note: " << n.get<std::string>() << "\n";
  return os.str();
}

void write_artifacts(const std::string& out_dir, const json& manifold, const ResidualReport* residual,
                     const json& summary, const json* operators) {
  if (out_dir.empty()) return;
  const fs::path dir(out_dir);
  fs::create_directories(dir);
  write_text(dir / "manifold.json", dump_json(manifold));
  if (residual) write_text(dir / "residual.csv", residual_csv(*residual));
  if (operators) write_text(dir / "operators.json", dump_json(*operators));
  write_text(dir / "summary.json", dump_json(summary));
  write_text(dir / "summary.txt", summary_text(summary));
}

json checks_json(const std::vector<CoefficientCheck>& checks) {
  json a = json::array();
  for (const auto& c : checks) a.push_back(to_json(c));
  return a;
}

json steps_json(const std::vector<StepRecord>& log) {
  json a = json::array();
  for (const auto& r : log) a.push_back(to_json(r));
  return a;
}

json base_summary(const std::string& command, const ManifoldPair& pair) {
  json s;
  s["command"] = command;
  s["branch"] = to_string(pair.branch);
  s["achieved_n"] = pair.n;
  s["k"] = pair.k;
  s["p"] = pair.p;
  return s;
}

// ---------------------------------------------------------------------------
// commands

json solve_map(const json& cfg, const std::string& out) {
  const Common c = read_common(cfg, 6, 32);
  const ReducedMap F = read_map(cfg, c);
  std::vector<StepRecord> log;
  const bool unstable = c.branch == Branch::unstable;
  const ManifoldPair pair = solve_to_order(F, c.branch, c.n_target, &log);
  const ResidualGrid grid = read_grid(c.grid, F.freq.d());
  const ResidualReport rep = residual_report(pair, F, grid);
  json s = base_summary("solve-map", pair);
  s["residual"] = to_json(rep);
  s["coefficient_checks"] = checks_json(leading_checks(pair, F.data, F.k, F.p, c.coefficient_tol));
  s["steps"] = steps_json(log);
  if (unstable) s["inverse_residual"] = to_json(inverse_residual_report(pair, F, grid));
  if (cfg.contains("sector")) {
    const json& sb = section(cfg, "sector");
    Sector sec{num(sb, "beta", std::numbers::pi / 2), num(sb, "rho", 0.05), F.k};
    validate_sector(sec);
    if (c.branch == Branch::stable) {
      const double lead = to_double(pair.R.coeff(F.k));
      const MuBound mu = make_mu_bound(num(sb, "mu", 0.5 * mu_limit(sec, lead)), sec, lead);
      const SectorReport sr =
          sector_iterate_check(pair.R, sec, mu, integer(sb, "iterations", 1000), sector_samples(sec), true);
      s["operators"]["sector"] = to_json(sr);
    } else {
      s["notes"].push_back("sector check skipped: it applies to the stable branch");
    }
  }
  write_artifacts(out, to_json(pair), &rep, s, nullptr);
  return s;
}

json solve_flow(const json& cfg, const std::string& out) {
  const Common c = read_common(cfg, 6, 8);
  const ReducedField X = read_field(cfg, c);
  std::vector<StepRecord> log;
  const FlowPair pair = solve_flow_to_order(X, c.branch, c.n_target, &log);
  const ResidualReport rep = flow_residual_report(pair, X, read_grid(c.grid, X.freq.torus_dim()));
  json s = base_summary("solve-flow", pair);
  s["residual"] = to_json(rep);
  s["coefficient_checks"] = checks_json(leading_checks(pair, X.data, X.k, X.p, c.coefficient_tol));
  s["steps"] = steps_json(log);
  write_artifacts(out, to_json(pair), &rep, s, nullptr);
  return s;
}

json solve_helicoure_cmd(const json& cfg, const std::string& out) {
  const Common c = read_common(cfg, 6, 8);
  const HelicoureField X = read_helicoure(cfg, c);
  std::vector<StepRecord> log;
  const FlowPair pair = solve_helicoure(X, c.n_target, c.branch, &log);
  const ResidualReport rep = helicoure_residual_report(pair, X, read_grid(c.grid, X.freq.torus_dim()));
  json s = base_summary("helicoure", pair);
  s["residual"] = to_json(rep);
  s["coefficient_checks"] = checks_json(helicoure_checks(pair, X, c.coefficient_tol));
  s["steps"] = steps_json(log);
  write_artifacts(out, to_json(pair), &rep, s, nullptr);
  return s;
}

json oscillator_cmd(const json& cfg, const std::string& out) {
  const Common c = read_common(cfg, 6, 16);
  const OscillatorParams P = read_oscillator(cfg, c);
  const ReducedField X = build_oscillator_field(P);
  const FlowPair pair = oscillator_manifold(P, c.branch, c.n_target);
  const ResidualReport rep = flow_residual_report(pair, X, read_grid(c.grid, X.freq.torus_dim()));
  json s = base_summary("oscillator", pair);
  s["residual"] = to_json(rep);
  s["coefficient_checks"] = checks_json(leading_checks(pair, X.data, X.k, X.p, c.coefficient_tol));
  if (c.branch == Branch::unstable) s["notes"].push_back("unstable manifold obtained by time reversal");
  write_artifacts(out, to_json(pair), &rep, s, nullptr);
  return s;
}

json hecu_cmd(const json& cfg, const std::string& out) {
  const Common c = read_common(cfg, 6, 16);
  const HeCuParams P = read_hecu(cfg, c);
  const HeCuResult r = hecu_manifolds(P, c.n_target, c.coefficient_tol);
  const bool stable = c.branch == Branch::stable;
  const FlowPair& pair = stable ? r.stable : r.unstable;
  const ResidualReport& rep = stable ? r.stable_residual : r.unstable_residual;
  json s = base_summary("hecu", pair);
  s["residual"] = to_json(rep);
  s["coefficient_checks"] = checks_json(r.checks);
  s["field"] = json{{"c", to_double(r.field.c)},     {"b", to_double(r.field.b)},
                    {"d", to_double(r.field.d)},     {"e20", to_double(r.field.e20)},
                    {"omega", to_double(r.field.omega)}, {"degree", r.field.degree}};
  s["k1_predicted"] = r.k1_predicted;
  s["residual_other_branch"] = to_json(stable ? r.unstable_residual : r.stable_residual);
  s["notes"].push_back("residual measured against the unexpanded physical field");
  write_artifacts(out, to_json(pair), &rep, s, nullptr);
  return s;
}

ComplexD test_defect(ComplexD u, const std::vector<double>& th, int order) {
  const double g = th.empty() ? 1.0 : 1.0 + 0.5 * std::cos(2 * std::numbers::pi * th[0]);
  return std::pow(u, order) * g;
}

json diagnose_cmd(const json& cfg, const std::string& out) {
  const Common c = read_common(cfg, 8, 32);
  const ReducedMap F = read_map(cfg, c);
  const ManifoldPair pair = solve_to_order(F, Branch::stable, c.n_target);
  const int k = F.k, n = pair.n;
  const double lead = to_double(pair.R.coeff(k));
  const json& sb = section(cfg, "sector");
  Sector sec{num(sb, "beta", std::numbers::pi / 2), num(sb, "rho", 0.05), k};
  validate_sector(sec);
  const MuBound mu = make_mu_bound(num(sb, "mu", 0.5 * mu_limit(sec, lead)), sec, lead);

  json ops;
  json s = base_summary("diagnose-operators", pair);
  if (c.branch == Branch::unstable) s["notes"].push_back("operator diagnostics use the stable branch");
  const SectorReport sr =
      sector_iterate_check(pair.R, sec, mu, integer(sb, "iterations", 1000), sector_samples(sec), false);
  ops["sector"] = to_json(sr);

  std::vector<double> omega;
  for (Real w : F.freq.omega) omega.push_back(to_double(w));
  const int order = n + k - 1;
  const ComplexDefect eta = [order](ComplexD u, const std::vector<double>& th) { return test_defect(u, th, order); };
  TailControl tc;
  tc.k = k;
  tc.order = order;
  tc.eta_norm = 1.5;
  tc.mu = mu.mu;
  tc.tol = 1e-30;

  // orbit sums at 50 sample points
  const std::vector<ComplexD> pts = sector_samples(sec, 5, 10);
  double orbit_defect = 0, orbit_norm = 0;
  const ComplexDefect inv = [&](ComplexD u, const std::vector<double>& th) {
    TailControl t = tc;
    t.tol = 1e-12 * std::pow(std::abs(u), order);
    return orbit_sum_inverse(eta, pair.R, omega, u, th, t).value;
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::vector<double> th(F.freq.d(), double(i) / pts.size());
    const ComplexD e = eta(pts[i], th);
    orbit_defect = std::max(orbit_defect, std::abs(apply_shift_operator(inv, pair.R, omega, pts[i], th) - e) / std::abs(e));
    orbit_norm = std::max(orbit_norm, std::abs(inv(pts[i], th)) / std::pow(std::abs(pts[i]), n));
  }
  ops["orbit_inverse"] = json{{"samples", pts.size()},
                              {"max_rel_defect", orbit_defect},
                              {"sampled_norm", orbit_norm},
                              {"norm_bound", inverse_norm_bound(Setting::map, sec, mu.mu, n) * tc.eta_norm},
                              {"pass", orbit_defect <= c.inverse_tol}};

  // flow quadrature with drift R_k u^k and the map frequencies
  FlowDrift J{UPoly::tangent(k, pair.R.coeff(k)), omega};
  J.Y.set(1, 0);
  const ComplexDefect finv = [&](ComplexD u, const std::vector<double>& th) {
    TailControl t = tc;
    t.tol = 1e-13 * std::pow(std::abs(u), order);
    t.quad_rel = 1e-15;
    return flow_inverse(eta, J, u, th, t, &sec).value;
  };
  double flow_defect = 0, flow_norm = 0;
  const std::vector<ComplexD> fpts = sector_samples(sec, 2, 5);
  for (std::size_t i = 0; i < fpts.size(); ++i) {
    const std::vector<double> th(F.freq.d(), double(i) / fpts.size());
    const ComplexD e = eta(fpts[i], th);
    double fastest = std::abs(J.Y.eval_double(fpts[i])) / std::abs(fpts[i]);
    for (double w : omega) fastest = std::max(fastest, 2 * std::numbers::pi * std::abs(w));
    const double h = 2e-2 / fastest;
    const ComplexD d1 = directional_derivative(finv, J, fpts[i], th, h);
    const ComplexD d2 = directional_derivative(finv, J, fpts[i], th, 2 * h);
    flow_defect = std::max(flow_defect, std::abs((4.0 * d1 - d2) / 3.0 - e) / std::abs(e));
    flow_norm = std::max(flow_norm, std::abs(finv(fpts[i], th)) / std::pow(std::abs(fpts[i]), n));
  }
  // int_0^inf (u/(1+su))^3 ds = u^2/2
  TailControl oc;
  oc.k = 2;
  oc.order = 3;
  oc.eta_norm = 1;
  oc.mu = 0.9;
  oc.tol = 1e-16;
  const double u0 = 0.01;
  const InverseValue ov = flow_inverse([](ComplexD u, const std::vector<double>&) { return u * u * u; },
                                       FlowDrift{UPoly(std::vector<Real>{0, 0, -1}), {}}, u0, {}, oc);
  const double oracle_err = std::abs(-ov.value.real() - u0 * u0 / 2) / (u0 * u0 / 2);
  ops["flow_inverse"] = json{{"samples", fpts.size()},
                             {"max_rel_defect", flow_defect},
                             {"sampled_norm", flow_norm},
                             {"norm_bound", inverse_norm_bound(Setting::flow, sec, mu.mu, n) * tc.eta_norm},
                             {"oracle_rel_error", oracle_err},
                             {"pass", flow_defect <= c.inverse_tol && oracle_err <= 1e-8}};

  const bool run_probe = !cfg.contains("contraction") || !cfg["contraction"].is_boolean() || cfg["contraction"].get<bool>();
  if (run_probe) {
    const json cb = cfg.contains("contraction") && cfg["contraction"].is_object() ? cfg["contraction"] : json::object();
    ContractionOptions o;
    o.rho = num(cb, "rho", o.rho);
    o.ball_alpha = num(cb, "ball_alpha", o.ball_alpha);
    o.iterations = integer(cb, "iterations", o.iterations);
    o.u_nodes = integer(cb, "u_nodes", o.u_nodes);
    o.theta_nodes = integer(cb, "theta_nodes", o.theta_nodes);
    ops["contraction"] = to_json(contraction_probe(F, pair, o));
  }
  s["operators"] = ops;
  write_artifacts(out, to_json(pair), nullptr, s, &ops);

  std::string failed;
  if (!sr.ok) failed += " sector bound (witness u=(" + fmt(sr.witness_u.real()) + "," + fmt(sr.witness_u.imag()) +
                        "), j=" + std::to_string(sr.witness_j) + ")";
  if (!ops["orbit_inverse"]["pass"].get<bool>()) failed += " orbit-sum inverse";
  if (!ops["flow_inverse"]["pass"].get<bool>()) failed += " flow inverse";
  if (!failed.empty()) throw DiagnosticError(sr.ok ? "InverseCheckFailed" : "BoundViolated", "diagnostics failed:" + failed);
  return s;
}

fs::path manifold_path(const std::string& p) {
  const fs::path path(p);
  if (fs::is_directory(path)) return path / "manifold.json";
  return path;
}

json apply_overrides(json cfg, const CliRequest& req) {
  if (req.order) cfg["n_target"] = *req.order;
  if (req.branch) cfg["branch"] = *req.branch;
  return cfg;
}

}  // namespace

json load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file " + path);
  try {
    return json::parse(f, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

json run_once(const std::string& command, const json& config, const std::string& out_dir) {
  try {
    if (command == "solve-map") return solve_map(config, out_dir);
    if (command == "solve-flow") return solve_flow(config, out_dir);
    if (command == "helicoure") return solve_helicoure_cmd(config, out_dir);
    if (command == "oscillator") return oscillator_cmd(config, out_dir);
    if (command == "hecu") return hecu_cmd(config, out_dir);
    if (command == "diagnose-operators") return diagnose_cmd(config, out_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  throw ConfigError("unknown command '" + command + "'");
}

json run_compare(const std::string& a, const std::string& b, double rel_tol) {
  auto load = [](const std::string& p) {
    const fs::path path = manifold_path(p);
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open " + path.string());
    try {
      return pair_from_json(json::parse(f));
    } catch (const json::parse_error& e) {
      throw ConfigError(path.string() + " is not valid JSON: " + e.what());
    }
  };
  const ManifoldPair pa = load(a), pb = load(b);
  json r = to_json(compare_pairs(pa, pb, rel_tol));
  r["a"] = json{{"n", pa.n}, {"branch", to_string(pa.branch)}};
  r["b"] = json{{"n", pb.n}, {"branch", to_string(pb.branch)}};
  return r;
}

json error_json(const std::string& kind, int exit_code, const std::string& message) {
  return json{{"error", kind}, {"exit_code", exit_code}, {"message", message}};
}

int run_cli(const CliRequest& req, std::ostream& out, std::ostream& err) {
  try {
    if (req.command == "compare") {
      if (req.inputs.size() != 2) throw ConfigError("compare needs exactly two runs");
      const json r = run_compare(req.inputs[0], req.inputs[1]);
      if (!req.out_dir.empty()) {
        fs::create_directories(req.out_dir);
        write_text(fs::path(req.out_dir) / "compare.json", dump_json(r));
      }
      out << dump_json(r);
      return 0;
    }
    json cfg = req.config_path.empty() ? json::object() : load_config_file(req.config_path);
    if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    if (cfg.contains("sweep")) {
      const json sweep = cfg["sweep"];
      if (!sweep.is_array()) throw ConfigError("'sweep' must be an array of config patches");
      cfg.erase("sweep");
      json all = json::array();
      for (std::size_t i = 0; i < sweep.size(); ++i) {
        json run_cfg = cfg;
        run_cfg.merge_patch(sweep[i]);
        run_cfg = apply_overrides(run_cfg, req);
        char name[32];
        std::snprintf(name, sizeof name, "sweep_%03zu", i);
        const std::string dir = req.out_dir.empty() ? "" : (fs::path(req.out_dir) / name).string();
        json s = run_once(req.command, run_cfg, dir);
        all.push_back(json{{"index", i}, {"patch", sweep[i]}, {"summary", s}});
      }
      if (!req.out_dir.empty()) write_text(fs::path(req.out_dir) / "sweep.json", dump_json(all));
      out << dump_json(json{{"sweep_runs", all.size()}});
      return 0;
    }
    const json s = run_once(req.command, apply_overrides(cfg, req), req.out_dir);
    if (req.out_dir.empty())
      out << dump_json(s);
    else
      out << summary_text(s);
    return 0;
  } catch (const SmallDivisorUnderflow& e) {
    json j = error_json(e.kind(), static_cast<int>(e.code()), e.what());
    j["mode"] = e.mode();
    j["divisor"] = e.magnitude();
    err << dump_json(j, 0);
    return static_cast<int>(e.code());
  } catch (const Error& e) {
    err << dump_json(error_json(e.kind(), static_cast<int>(e.code()), e.what()), 0);
    return static_cast<int>(e.code());
  } catch (const fs::filesystem_error& e) {
    err << dump_json(error_json("IOError", 2, e.what()), 0);
    return 2;
  } catch (const std::exception& e) {
    err << dump_json(error_json("InternalError", 1, e.what()), 0);
    return 1;
  }
}

}  // namespace ptori
