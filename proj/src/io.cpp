#include "ptori/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "ptori/errors.hpp"

namespace ptori {

namespace {

std::string num17(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep it recognisably floating point
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump_rec(const json& j, int indent, int depth, std::string& out) {
  const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent) * (depth + 1), ' ') : "";
  const std::string pad_end = indent > 0 ? std::string(static_cast<std::size_t>(indent) * depth, ' ') : "";
  const char* nl = indent > 0 ? "\n" : "";
  const char* colon = indent > 0 ? ": " : ":";
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{";
      out += nl;
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) {
          out += ",";
          out += nl;
        }
        first = false;
        out += pad + json(it.key()).dump() + colon;
        dump_rec(it.value(), indent, depth + 1, out);
      }
      out += nl + pad_end + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // numeric arrays stay on one line
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_number(); });
      out += "[";
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? (indent > 0 ? ", " : ",") : ",";
        if (!flat) out += nl + pad;
        first = false;
        dump_rec(e, indent, depth + 1, out);
      }
      if (!flat) out += nl + pad_end;
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += num17(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

Real parse_decimal(const std::string& s) {
  char* end = nullptr;
#ifdef PTORI_DOUBLE_ONLY
  const Real v = std::strtod(s.c_str(), &end);
#else
  const Real v = strtoflt128(s.c_str(), &end);
#endif
  if (end == s.c_str() || *end != '\0') throw ConfigError("cannot parse number '" + s + "'");
  return v;
}

int get_int(const json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number_integer()) throw ConfigError(std::string("missing integer field '") + key + "'");
  return j[key].get<int>();
}

Mode parse_mode(const json& j, int dim) {
  Mode k;
  if (j.is_number_integer()) {
    k.push_back(j.get<int>());
  } else if (j.is_array()) {
    for (const auto& e : j) k.push_back(e.get<int>());
  } else {
    throw ConfigError("mode must be an integer or an integer array");
  }
  if (static_cast<int>(k.size()) != dim)
    throw ConfigError("mode of length " + std::to_string(k.size()) + " on a torus of dimension " + std::to_string(dim));
  return k;
}

double dbl(Real x) { return to_double(x); }

}  // namespace

std::string dump_json(const json& j, int indent) {
  std::string out;
  dump_rec(j, indent, 0, out);
  out += "\n";
  return out;
}

Real parse_real(const json& j) {
  if (j.is_number()) return Real(j.get<double>());
  if (!j.is_string()) throw ConfigError("expected a number, got " + j.dump());
  std::string s = j.get<std::string>();
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  Real sign = 1;
  if (!s.empty() && s[0] == '-' && (s.rfind("-sqrt(", 0) == 0 || s == "-golden")) {
    sign = -1;
    s = s.substr(1);
  }
  if (s == "golden") return sign * (qsqrt(Real(5)) - 1) / 2;
  if (s.rfind("sqrt(", 0) == 0 && s.back() == ')') return sign * qsqrt(parse_decimal(s.substr(5, s.size() - 6)));
  return sign * parse_decimal(s);
}

std::vector<Real> parse_real_vector(const json& j) {
  std::vector<Real> v;
  if (j.is_null()) return v;
  if (!j.is_array()) return {parse_real(j)};
  for (const auto& e : j) v.push_back(parse_real(e));
  return v;
}

json to_json(const FourierSeries& f) {
  json modes = json::array();
  f.for_each_half([&](const Mode& k, Complex c) {
    modes.push_back(json{{"k", k}, {"re", dbl(c.real())}, {"im", dbl(c.imag())}});
  });
  return json{{"dim", f.dim()}, {"max_mode", f.max_mode()}, {"modes", modes}};
}

FourierSeries fourier_from_json(const json& j) {
  if (!j.is_object() || !j.contains("modes")) throw ConfigError("Fourier series needs dim, max_mode and modes");
  return fourier_from_json(j, get_int(j, "dim"), get_int(j, "max_mode"));
}

FourierSeries fourier_from_json(const json& j, int dim, int max_mode) {
  FourierSeries f(dim, max_mode);
  if (j.is_number() || j.is_string()) return FourierSeries::constant(dim, max_mode, parse_real(j));
  if (!j.is_object()) throw ConfigError("Fourier series must be a number or an object");
  if (j.contains("modes")) {
    if (j.contains("dim") && j["dim"].get<int>() != dim)
      throw ConfigError("Fourier series of dimension " + std::to_string(j["dim"].get<int>()) + " where " +
                        std::to_string(dim) + " is expected");
    for (const auto& m : j["modes"]) {
      const Mode k = parse_mode(m.at("k"), dim);
      if (std::any_of(k.begin(), k.end(), [&](int x) { return std::abs(x) > max_mode; })) continue;
      const Real re = m.contains("re") ? parse_real(m["re"]) : Real(0);
      const Real im = m.contains("im") ? parse_real(m["im"]) : Real(0);
      if (!is_nonneg(k)) {
        f.add_to(negate(k), Complex(re, -im));
      } else {
        f.add_to(k, Complex(re, im));
      }
    }
    return f;
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "const") {
      f += FourierSeries::constant(dim, max_mode, parse_real(it.value()));
    } else if (key == "cos" || key == "sin") {
      for (const auto& t : it.value()) {
        const Mode k = parse_mode(t.at("k"), dim);
        const Real amp = parse_real(t.at("amp"));
        f += key == "cos" ? FourierSeries::cosine(dim, max_mode, k, amp) : FourierSeries::sine(dim, max_mode, k, amp);
      }
    } else {
      throw ConfigError("unknown Fourier shorthand key '" + key + "'");
    }
  }
  return f;
}

json to_json(const TFJet& f) {
  json coeffs = json::array();
  for (int i = 0; i <= f.max_order(); ++i)
    if (!f.coeff(i).is_zero()) coeffs.push_back(json{{"order", i}, {"series", to_json(f.coeff(i))}});
  return json{{"dim", f.dim()},         {"max_mode", f.max_mode()}, {"min_order", f.min_order()},
              {"max_order", f.max_order()}, {"angle", f.angle()},     {"coeffs", coeffs}};
}

TFJet tfjet_from_json(const json& j) {
  const int dim = get_int(j, "dim"), M = get_int(j, "max_mode"), N = get_int(j, "max_order");
  TFJet f(dim, M, N, j.value("angle", false));
  for (const auto& c : j.at("coeffs")) {
    const int i = c.at("order").get<int>();
    if (i < 0 || i > N) throw ConfigError("jet coefficient order " + std::to_string(i) + " out of range");
    f.set_coeff(i, fourier_from_json(c.at("series"), dim, M));
  }
  return f;
}

json to_json(const UPoly& p) {
  json a = json::array();
  for (Real c : p.coeffs()) a.push_back(dbl(c));
  return a;
}

UPoly upoly_from_json(const json& j) { return UPoly(parse_real_vector(j)); }

json to_json(const TFPoly& p) {
  json a = json::array();
  for (const auto& [e, s] : p.terms()) a.push_back(json{{"l", e.first}, {"m", e.second}, {"series", to_json(s)}});
  return a;
}

TFPoly tfpoly_from_json(const json& j, int dim, int max_mode, int max_degree) {
  TFPoly p(dim, max_mode, max_degree);
  if (j.is_null()) return p;
  if (!j.is_array()) throw ConfigError("polynomial must be an array of {l, m, series} terms");
  for (const auto& t : j) {
    const int l = t.at("l").get<int>(), m = t.at("m").get<int>();
    if (l < 0 || m < 0) throw ConfigError("negative exponent in polynomial term");
    if (l + m > max_degree) continue;
    p.add(l, m, fourier_from_json(t.at("series"), dim, max_mode));
  }
  return p;
}

json to_json(const ManifoldPair& pair) {
  json j;
  j["setting"] = pair.setting == Setting::map ? "map" : "flow";
  j["helicoure"] = pair.helicoure;
  j["branch"] = to_string(pair.branch);
  j["n"] = pair.n;
  j["k"] = pair.k;
  j["p"] = pair.p;
  json om = json::array();
  for (Real w : pair.freq.omega) om.push_back(dbl(w));
  j["omega"] = om;
  if (pair.setting == Setting::flow) {
    json nu = json::array();
    for (Real w : pair.freq.nu) nu.push_back(dbl(w));
    j["nu"] = nu;
  }
  j["R"] = to_json(pair.R);
  j["Kx"] = to_json(pair.Kx);
  j["Ky"] = to_json(pair.Ky);
  json th = json::array();
  for (const auto& t : pair.Ktheta) th.push_back(to_json(t));
  j["Ktheta"] = th;
  return j;
}

ManifoldPair pair_from_json(const json& j) {
  ManifoldPair p;
  try {
    const std::string s = j.at("setting").get<std::string>();
    if (s != "map" && s != "flow") throw ConfigError("setting must be map or flow");
    p.setting = s == "map" ? Setting::map : Setting::flow;
    p.helicoure = j.value("helicoure", false);
    p.branch = parse_branch(j.at("branch").get<std::string>());
    p.n = j.at("n").get<int>();
    p.k = j.at("k").get<int>();
    p.p = j.at("p").get<int>();
    p.freq.omega = parse_real_vector(j.at("omega"));
    if (j.contains("nu")) p.freq.nu = parse_real_vector(j["nu"]);
    p.R = upoly_from_json(j.at("R"));
    p.Kx = tfjet_from_json(j.at("Kx"));
    p.Ky = tfjet_from_json(j.at("Ky"));
    for (const auto& t : j.at("Ktheta")) p.Ktheta.push_back(tfjet_from_json(t));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifold JSON: ") + e.what());
  }
  return p;
}

json to_json(const ResidualReport& r) {
  auto vec = [](const std::vector<Real>& v) {
    json a = json::array();
    for (Real x : v) a.push_back(dbl(x));
    return a;
  };
  return json{{"fit_range", {r.fit_lo, r.fit_hi}},
              {"slopes", {r.slope[0], r.slope[1], r.slope[2]}},
              {"expected_orders", {r.expected[0], r.expected[1], r.expected[2]}},
              {"u", vec(r.u)},
              {"res_x", vec(r.res_x)},
              {"res_y", vec(r.res_y)},
              {"res_theta", vec(r.res_theta)}};
}

std::string residual_csv(const ResidualReport& r) {
  std::string out = "u,res_x,res_y,res_theta\n";
  for (std::size_t i = 0; i < r.u.size(); ++i)
    out += num17(dbl(r.u[i])) + "," + num17(dbl(r.res_x[i])) + "," + num17(dbl(r.res_y[i])) + "," +
           num17(dbl(r.res_theta[i])) + "\n";
  return out;
}

json to_json(const StepRecord& r) {
  double det = 0;
  if (r.matrix.size() >= 2) {
    det = r.matrix[0][0] * r.matrix[1][1] - r.matrix[0][1] * r.matrix[1][0];
    for (std::size_t i = 2; i < r.matrix.size(); ++i) det *= r.matrix[i][i];
  }
  return json{{"n", r.n},           {"degenerate", r.degenerate}, {"determinant", det},
              {"matrix", r.matrix}, {"rhs", r.rhs},               {"solution", r.solution},
              {"r_new", r.r_new},   {"g_avg", r.g_avg}};
}

json to_json(const SectorReport& r) {
  json j{{"iterations", r.iterations}, {"samples", r.samples}, {"min_slack", r.min_slack}, {"ok", r.ok}};
  if (!r.ok)
    j["witness"] = json{{"u", {r.witness_u.real(), r.witness_u.imag()}}, {"j", r.witness_j}, {"kind", r.witness_kind}};
  return j;
}

json to_json(const ContractionReport& r) {
  return json{{"n", r.n},
              {"k", r.k},
              {"p", r.p},
              {"rho", r.rho},
              {"u_min", r.u_min},
              {"mu", r.mu},
              {"ball_alpha", r.ball_alpha},
              {"grid_points", r.grid_points},
              {"orbit_terms", r.orbit_terms},
              {"delta_norms", r.delta_norms},
              {"update_norms", r.update_norms},
              {"factors", r.factors},
              {"residuals", r.residuals},
              {"max_factor", r.max_factor},
              {"contracting", r.contracting},
              {"residual_monotone", r.residual_monotone},
              {"in_ball", r.in_ball},
              {"note", r.note}};
}

json to_json(const CoefficientCheck& c) {
  return json{{"name", c.name},
              {"computed", c.computed},
              {"expected", c.expected},
              {"rel_error", c.rel_error},
              {"pass", c.pass}};
}

// ---------------------------------------------------------------------------
// compare

namespace {

bool differs(Complex a, Complex b, double tol) {
  const Real scale = std::max({Real(1), qabs(a), qabs(b)});
  return qabs(a - b) > Real(tol) * scale;
}

Complex coeff_or_zero(const FourierSeries& f, const Mode& k) {
  const bool inside = std::all_of(k.begin(), k.end(), [&](int x) { return std::abs(x) <= f.max_mode(); });
  return inside ? f.coeff(k) : Complex(0, 0);
}

// max |a_k - b_k| over the union of stored modes
Real series_diff(const FourierSeries& a, const FourierSeries& b, double tol, bool* any) {
  std::set<Mode> modes;
  a.for_each_half([&](const Mode& k, Complex) { modes.insert(k); });
  b.for_each_half([&](const Mode& k, Complex) { modes.insert(k); });
  Real worst = 0;
  for (const Mode& k : modes) {
    const Complex ca = coeff_or_zero(a, k), cb = coeff_or_zero(b, k);
    worst = std::max(worst, qabs(ca - cb));
    if (differs(ca, cb, tol)) *any = true;
  }
  return worst;
}

std::string relation(const FourierSeries& a, const FourierSeries& b) {
  constexpr double tol = 1e-12;
  bool eq = false, opp = false;
  series_diff(a, b, tol, &eq);
  series_diff(a, -b, tol, &opp);
  if (!eq) return "equal";
  if (!opp) return "opposite";
  return "different";
}

ComponentDiff diff_jets(const std::string& name, const TFJet& a, const TFJet& b, double tol) {
  ComponentDiff d;
  d.name = name;
  const int N = std::min(a.max_order(), b.max_order());
  Real worst = 0;
  for (int i = 0; i <= N; ++i) {
    bool any = false;
    worst = std::max(worst, series_diff(a.coeff(i), b.coeff(i), tol, &any));
    if (any && d.lowest_order < 0) d.lowest_order = i;
  }
  d.max_abs_diff = dbl(worst);
  const int la = a.min_order(), lb = b.min_order();
  if (la > a.max_order() && lb > b.max_order())
    d.leading_relation = "absent";
  else if (la != lb)
    d.leading_relation = "different";
  else
    d.leading_relation = relation(a.coeff(la), b.coeff(lb));
  return d;
}

ComponentDiff diff_polys(const std::string& name, const UPoly& a, const UPoly& b, double tol) {
  ComponentDiff d;
  d.name = name;
  const int N = std::max(a.degree(), b.degree());
  Real worst = 0;
  for (int i = 0; i <= N; ++i) {
    worst = std::max(worst, qabs(a.coeff(i) - b.coeff(i)));
    if (differs(a.coeff(i), b.coeff(i), tol) && d.lowest_order < 0) d.lowest_order = i;
  }
  d.max_abs_diff = dbl(worst);
  // leading nonlinear coefficient
  const int la = a.leading_index(), lb = b.leading_index();
  if (la == 0 && lb == 0) {
    d.leading_relation = "absent";
  } else if (la != lb) {
    d.leading_relation = "different";
  } else {
    const Real x = a.coeff(la), y = b.coeff(lb);
    d.leading_relation = !differs(x, y, 1e-12) ? "equal" : !differs(x, -y, 1e-12) ? "opposite" : "different";
  }
  return d;
}

}  // namespace

CompareReport compare_pairs(const ManifoldPair& a, const ManifoldPair& b, double rel_tol) {
  if (a.setting != b.setting || a.k != b.k || a.p != b.p || a.Ktheta.size() != b.Ktheta.size() ||
      a.Kx.dim() != b.Kx.dim())
    throw ConfigError("compare: the two runs describe different problems");
  CompareReport r;
  r.components.push_back(diff_jets("Kx", a.Kx, b.Kx, rel_tol));
  r.components.push_back(diff_jets("Ky", a.Ky, b.Ky, rel_tol));
  for (std::size_t i = 0; i < a.Ktheta.size(); ++i)
    r.components.push_back(diff_jets("Ktheta" + std::to_string(i), a.Ktheta[i], b.Ktheta[i], rel_tol));
  r.components.push_back(diff_polys(a.setting == Setting::map ? "R" : "Y", a.R, b.R, rel_tol));
  for (const auto& c : r.components)
    if (c.lowest_order >= 0) r.identical = false;
  return r;
}

json to_json(const CompareReport& r) {
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back(json{{"name", c.name},
                         {"lowest_differing_order", c.lowest_order < 0 ? json(nullptr) : json(c.lowest_order)},
                         {"max_abs_diff", c.max_abs_diff},
                         {"leading_relation", c.leading_relation}});
  return json{{"identical", r.identical}, {"components", comps}};
}

}  // namespace ptori
