#include "ptori/applications.hpp"

#include <algorithm>

#include "ptori/errors.hpp"

namespace ptori {

namespace {

// f with the angles from index `first` on reversed
FourierSeries reflect_from(const FourierSeries& f, int first) {
  FourierSeries r(f.dim(), f.max_mode());
  f.for_each_half([&](const Mode& k, const Complex& c) {
    Mode k2 = k;
    for (std::size_t a = first; a < k2.size(); ++a) k2[a] = -k2[a];
    r.set(k2, c);
  });
  return r;
}

// sum f_lm(theta, -tau) sx^l sy^m x^l y^m
TFPoly transform_poly(const TFPoly& f, int first, Real sx, Real sy, Real overall) {
  TFPoly r = f.zero_like();
  for (const auto& [e, s] : f.terms()) {
    Real sign = overall;
    if (e.first % 2) sign *= sx;
    if (e.second % 2) sign *= sy;
    r.add(e.first, e.second, reflect_from(s, first) * sign);
  }
  return r;
}

TFJet reflect_jet(const TFJet& f, int first, Real sign) {
  TFJet r(f.dim(), f.max_mode(), f.max_order(), f.angle());
  for (int i = 0; i <= f.max_order(); ++i)
    if (!f.coeff(i).is_zero()) r.set_coeff(i, reflect_from(f.coeff(i), first) * sign);
  return r;
}

UPoly negated(const UPoly& p) {
  std::vector<Real> c = p.coeffs();
  for (auto& v : c) v = -v;
  return UPoly(c);
}

CoefficientCheck check(const std::string& name, Real computed, Real expected, double tol) {
  CoefficientCheck c;
  c.name = name;
  c.computed = to_double(computed);
  c.expected = to_double(expected);
  c.rel_error = to_double(qabs(computed - expected) / std::max(qabs(expected), Real(1e-300)));
  c.pass = c.rel_error <= tol;
  return c;
}

}  // namespace

OscillatorParams default_oscillator(int max_mode) {
  OscillatorParams p;
  p.g = FourierSeries::constant(1, max_mode, 1) + FourierSeries::cosine(1, max_mode, {1}, Real(0.3));
  p.nu = {qsqrt(Real(2))};
  return p;
}

ReducedField build_oscillator_field(const OscillatorParams& p) {
  if (p.g.dim() != static_cast<int>(p.nu.size()))
    throw DimensionMismatch("oscillator: forcing torus dimension differs from the number of time frequencies");
  if (!(p.alpha > 0) || !(average(p.g) > 0))
    throw HypothesisError("HypothesisViolated", "oscillator: alpha and the average of g must be positive");
  if (!(p.c > 0)) throw HypothesisError("HypothesisViolated", "oscillator: the potential coefficient must be positive");
  if (p.n_pot < 2)
    throw HypothesisError("HypothesisViolated", "oscillator: the potential x^{2n} needs n >= 2 for a parabolic torus");
  const int dim = p.g.dim(), M = p.g.max_mode(), deg = 2 * p.n_pot - 1;
  Frequency freq;
  freq.nu = p.nu;
  TFPoly P(dim, M, std::max(deg, 3));
  P.add(2, 0, p.g * p.alpha);
  P.add(deg, 0, FourierSeries::constant(dim, M, -2 * Real(p.n_pot) * p.c));
  return make_reduced_field(FourierSeries::constant(dim, M, 1), P, {}, 2, 1, freq);
}

OscillatorParams time_reversed(const OscillatorParams& p) {
  OscillatorParams r = p;
  r.g = reflect(p.g);
  return r;
}

ReducedField build_oscillator_unstable(const OscillatorParams& p) { return build_oscillator_field(time_reversed(p)); }

ReducedField time_reverse_field(const ReducedField& X) {
  const int d = X.freq.d();
  ReducedField r = X;
  r.data.x = transform_poly(X.data.x, d, 1, -1, -1);
  r.data.y = transform_poly(X.data.y, d, 1, -1, 1);
  for (std::size_t i = 0; i < X.data.theta.size(); ++i) r.data.theta[i] = transform_poly(X.data.theta[i], d, 1, -1, -1);
  for (auto& w : r.freq.omega) w = -w;
  return r;
}

FlowPair pair_from_reversed(const FlowPair& rev, const Frequency& original) {
  const int d = original.d();
  FlowPair r = rev;
  r.freq = original;
  r.branch = rev.branch == Branch::stable ? Branch::unstable : Branch::stable;
  r.Kx = reflect_jet(rev.Kx, d, 1);
  r.Ky = reflect_jet(rev.Ky, d, -1);
  for (std::size_t i = 0; i < rev.Ktheta.size(); ++i) r.Ktheta[i] = reflect_jet(rev.Ktheta[i], d, 1);
  r.R = negated(rev.R);
  return r;
}

FlowPair oscillator_manifold(const OscillatorParams& p, Branch branch, int n_target) {
  if (branch == Branch::stable) return solve_flow_to_order(build_oscillator_field(p), Branch::stable, n_target);
  const ReducedField X = build_oscillator_field(p);
  const FlowPair rev = solve_flow_to_order(build_oscillator_unstable(p), Branch::stable, n_target);
  return pair_from_reversed(rev, X.freq);
}

HeCuParams default_hecu(int max_mode) {
  HeCuParams p;
  p.g_surface = FourierSeries::cosine(1, max_mode, {1}, Real(0.1));
  return p;
}

HeCuField build_hecu_field(const HeCuParams& P, int degree) {
  if (!(P.h > P.D)) throw HypothesisError("EnergyBelowThreshold", "He-Cu: the energy h must exceed D");
  if (!(P.D > 0) || !(P.m > 0) || !(P.alpha_morse > 0))
    throw HypothesisError("HypothesisViolated", "He-Cu: D, m and alpha must be positive");
  if (P.g_surface.dim() != 1) throw DimensionMismatch("He-Cu: the corrugation must live on T^1");
  const int M = P.g_surface.max_mode(), Dg = degree;
  auto C = [&](Real v) { return FourierSeries::constant(1, M, v); };
  const FourierSeries one_g = C(1) + P.g_surface;
  const Real A = 2 * P.m * (P.h - P.D), sA = qsqrt(A);
  const Real omega = sA / P.m;

  // theta' = (sqrt(A)/m) sqrt(1 + B/A), B = -p^2 - 4 m D y - 2 m D (1+g) y^2
  TFPoly B(1, M, Dg);
  B.add(2, 0, C(-1 / A));
  B.add(0, 1, C(-4 * P.m * P.D / A));
  B.add(0, 2, one_g * (-2 * P.m * P.D / A));
  TFPoly root = B.constant_like(C(1)), pw = B.constant_like(C(1));
  Real binom = 1;
  for (int j = 1; j <= Dg; ++j) {
    binom *= (Real(0.5) - Real(j - 1)) / Real(j);
    pw = pw * B;
    root += pw * binom;
  }
  const TFPoly theta_dot = root * omega;

  NormalizationRecord norm;
  const TFPoly px = TFPoly::var_x(1, M, Dg), py = TFPoly::var_y(1, M, Dg);
  norm.forward = py;
  norm.forward.add(0, 2, one_g);
  TFPoly psi = py;
  for (int it = 0; it <= Dg; ++it) psi = py - (psi * psi) * one_g;
  norm.inverse = psi;

  // ytilde' = y' (1 + 2 (1+g) y) + g'(theta) theta' y^2, with y' = -(alpha/m) p y
  const TFPoly ydot = px * py * (-P.alpha_morse / P.m);
  TFPoly lin = py.constant_like(C(1));
  lin.add(0, 1, one_g * 2);
  const FourierSeries gp = diff_theta(P.g_surface, 0);
  const TFPoly yt_dot = ydot * lin + (py * py) * theta_dot * gp;

  const std::vector<TFPoly> none;
  TFPoly new_y = substitute(yt_dot, px, psi, none);
  TFPoly new_t = substitute(theta_dot, px, psi, none);
  const Real c0 = average(new_t.get(0, 0));
  if (qabs(c0 - omega) > Real(1e-28) * omega) throw Error("InternalError", ExitCode::internal, "He-Cu: constant term");
  new_t.erase(0, 0);
  new_y.prune(Real(1e-32));
  new_t.prune(Real(1e-32));

  HeCuField out;
  out.field.freq.omega = {omega};
  out.field.data.x = TFPoly(1, M, Dg);
  out.field.data.x.add(0, 1, C(2 * P.D * P.alpha_morse));
  out.field.data.y = new_y;
  out.field.data.theta = {new_t};
  out.norm = norm;
  out.c = 2 * P.D * P.alpha_morse;
  out.b = average(new_y.get(1, 1));
  out.d = average(new_t.get(0, 1));
  out.e20 = average(new_t.get(2, 0));
  out.omega = omega;
  out.degree = Dg;
  validate_helicoure_field(out.field);
  return out;
}

Point3 hecu_exact_rates(const HeCuParams& P, Real pp, Real y, Real theta) {
  const Real g = P.g_surface.eval({theta});
  const Real A = 2 * P.m * (P.h - P.D);
  Point3 r;
  r.x = 2 * P.D * P.alpha_morse * y * (1 + (1 + g) * y);
  r.y = -(P.alpha_morse / P.m) * pp * y;
  const Real s = A - pp * pp - 4 * P.m * P.D * y - 2 * P.m * P.D * (1 + g) * y * y;
  // theta' - omega = (s - A) / (m (sqrt(s) + sqrt(A)))
  r.theta = {(s - A) / (P.m * (qsqrt(s) + qsqrt(A)))};
  return r;
}

HelicoureField reverse_helicoure(const HelicoureField& X) {
  const int d = X.freq.d();
  HelicoureField r = X;
  r.data.x = transform_poly(X.data.x, d, -1, 1, 1);
  r.data.y = transform_poly(X.data.y, d, -1, 1, -1);
  for (std::size_t i = 0; i < X.data.theta.size(); ++i) r.data.theta[i] = transform_poly(X.data.theta[i], d, -1, 1, -1);
  for (auto& w : r.freq.omega) w = -w;
  return r;
}

FlowPair hecu_pullback(const FlowPair& pair, const NormalizationRecord& norm) {
  FlowPair r = pair;
  std::vector<TFJet> delta;
  for (const auto& t : pair.Ktheta) {
    TFJet j = t;
    j.set_angle(false);
    delta.push_back(j);
  }
  TFJet X = pair.Kx, Y = pair.Ky;
  X.set_angle(false);
  Y.set_angle(false);
  r.Ky = substitute(norm.inverse, X, Y, delta);
  return r;
}

ResidualReport hecu_exact_residual_report(const FlowPair& pair, const HeCuParams& p, const ResidualGrid& grid) {
  return field_residual_report(
      pair, [&p](Real x, Real y, const std::vector<Real>& a) { return hecu_exact_rates(p, x, y, a[0]); }, grid);
}

HeCuResult hecu_manifolds(const HeCuParams& P, int n_target, double tol) {
  HeCuResult out;
  out.field = build_hecu_field(P, n_target + 4);
  const HelicoureField& X = out.field.field;
  out.stable_normalized = solve_helicoure(X, n_target, Branch::stable);
  const FlowPair rev = solve_helicoure(reverse_helicoure(X), n_target, Branch::stable);
  FlowPair un = rev;
  un.freq = X.freq;
  un.branch = Branch::unstable;
  un.Kx = rev.Kx * Real(-1);
  un.R = negated(rev.R);
  out.unstable_normalized = un;
  out.stable = hecu_pullback(out.stable_normalized, out.field.norm);
  out.unstable = hecu_pullback(un, out.field.norm);

  const Real A = 2 * P.m * (P.h - P.D);
  const Real K2 = -1 / (4 * P.m * P.D);
  const Real K1 = -1 / (P.alpha_morse * qsqrt(A));
  const Real Y2 = P.alpha_morse / (2 * P.m);
  const Real omega = qsqrt(2 * (P.h - P.D) / P.m);
  const FlowPair& s = out.stable;
  const FlowPair& u = out.unstable;
  const Real sK2 = average(s.Ky.coeff(2)), sK1 = average(s.Ktheta[0].coeff(1));
  const Real uK2 = average(u.Ky.coeff(2)), uK1 = average(u.Ktheta[0].coeff(1));
  out.checks.push_back(check("stable K2^y", sK2, K2, tol));
  out.checks.push_back(check("stable K1^theta", sK1, K1, tol));
  out.checks.push_back(check("stable Y2 (= -Y_2)", s.R.coeff(2), -Y2, tol));
  out.checks.push_back(check("omega", X.freq.omega[0], omega, tol));
  out.checks.push_back(check("unstable |K2^y|", qabs(uK2), qabs(K2), tol));
  out.checks.push_back(check("unstable |K1^theta|", qabs(uK1), qabs(K1), tol));
  out.checks.push_back(check("unstable Y2 (= +Y_2)", u.R.coeff(2), Y2, tol));
  const Real Y2s = average(X.b()) / 2;
  out.k1_predicted = to_double((out.field.d * (Y2s / out.field.c) + out.field.e20) / Y2s);

  ResidualGrid grid = default_residual_grid(1);
  out.stable_residual = hecu_exact_residual_report(s, P, grid);
  out.unstable_residual = hecu_exact_residual_report(u, P, grid);
  return out;
}

}  // namespace ptori
