#include "ptori/reduced.hpp"

#include <algorithm>

#include "ptori/errors.hpp"

namespace ptori {

namespace {

HypothesisError structure(const std::string& what) { return HypothesisError("StructureViolation", what); }

std::string lm_str(const Exponent& e) {
  return "x^" + std::to_string(e.first) + " y^" + std::to_string(e.second);
}

bool is_const_one(const FourierSeries& s) {
  return s.size() == 1 && s.coeff(Mode(s.dim(), 0)) == Complex(1, 0);
}

// remainder allowed by the pattern y O(|.|^{q-1}) + O(|.|^{q+1})
bool allowed_remainder(const Exponent& e, int q) {
  const int l = e.first, m = e.second;
  return (m >= 1 && l + m >= q) || (l + m >= q + 1);
}

void check_common(const TaylorFourierData& D, int k, int p, bool is_map, int torus_dim, int d) {
  if (k < 2) throw HypothesisError("HypothesisViolated", "k must be at least 2");
  if (p < 1) throw HypothesisError("HypothesisViolated", "p must be at least 1");
  if (2 * p <= k - 1) throw HypothesisError("HypothesisViolated", "the exponents must satisfy 2p > k-1");
  if (D.x.dim() != torus_dim || D.y.dim() != torus_dim)
    throw DimensionMismatch("reduced data: torus dimension does not match the frequency");
  if (D.angle_dim() != d) throw DimensionMismatch("reduced data: number of angle components does not match omega");
  for (const auto& t : D.theta)
    if (t.dim() != torus_dim) throw DimensionMismatch("reduced data: torus dimension does not match the frequency");

  for (const auto& [e, s] : D.x.terms()) {
    if (e == Exponent{0, 1}) continue;
    if (is_map && e == Exponent{1, 0}) {
      if (!is_const_one(s)) throw structure("x-component: the x coefficient must be exactly 1");
      continue;
    }
    throw structure("x-component has a nonlinear or extra term " + lm_str(e));
  }
  if (is_map && !D.x.find(1, 0)) throw structure("x-component: missing the identity term x");
  if (!D.x.find(0, 1)) throw structure("x-component: missing the c(theta) y term");

  for (const auto& [e, s] : D.y.terms()) {
    if (e == Exponent{0, 1}) {
      if (is_map && is_const_one(s)) continue;
      throw structure(is_map ? "y-component: the y coefficient must be exactly 1" : "y-component has a linear y term");
    }
    if (e == Exponent{k, 0}) continue;
    if (!allowed_remainder(e, k)) throw structure("y-component term " + lm_str(e) + " violates the remainder pattern");
  }
  if (is_map && !D.y.find(0, 1)) throw structure("y-component: missing the identity term y");

  for (const auto& t : D.theta)
    for (const auto& [e, s] : t.terms()) {
      if (e == Exponent{p, 0}) continue;
      if (!allowed_remainder(e, p))
        throw structure("theta-component term " + lm_str(e) + " violates the remainder pattern");
    }
}

void check_signs(const FourierSeries& c, const FourierSeries& a, bool require_positive_a) {
  if (!(average(c) > 0)) throw HypothesisError("NonPositiveLeadingCoefficient", "the average of c must be positive");
  if (require_positive_a && !(average(a) > 0))
    throw HypothesisError("NonPositiveLeadingCoefficient", "the average of a_k must be positive");
}

TFPoly flip_y(const TFPoly& f, bool negate_all) {
  TFPoly r = f.zero_like();
  for (const auto& [e, s] : f.terms()) {
    Real sign = (e.second % 2 ? -1 : 1) * (negate_all ? -1 : 1);
    r.add(e.first, e.second, s * sign);
  }
  return r;
}

Real scale_of(const TFPoly& f) {
  Real m = 0;
  for (const auto& kv : f.terms()) m = std::max(m, kv.second.sup_coeff());
  return m;
}

}  // namespace

void validate_reduced_map(const ReducedMap& F, bool require_positive_a) {
  check_common(F.data, F.k, F.p, true, F.freq.d(), F.freq.d());
  if (F.freq.dprime() != 0) throw DimensionMismatch("reduced map: time frequencies are not allowed");
  check_signs(F.c(), F.a_k(), require_positive_a);
}

void validate_reduced_field(const ReducedField& X, bool require_positive_a) {
  check_common(X.data, X.k, X.p, false, X.freq.torus_dim(), X.freq.d());
  check_signs(X.c(), X.a_k(), require_positive_a);
}

ReducedMap make_reduced_map(const FourierSeries& c, const TFPoly& P, const std::vector<TFPoly>& Q, int k, int p,
                            const Frequency& freq) {
  ReducedMap F;
  const int dim = c.dim(), M = c.max_mode(), D = P.max_degree();
  F.data.x = TFPoly(dim, M, D);
  F.data.x.add(1, 0, FourierSeries::constant(dim, M, 1));
  F.data.x.add(0, 1, c);
  F.data.y = P;
  F.data.y.add(0, 1, FourierSeries::constant(dim, M, 1));
  F.data.theta = Q;
  F.k = k;
  F.p = p;
  F.freq = freq;
  validate_reduced_map(F);
  return F;
}

ReducedField make_reduced_field(const FourierSeries& c, const TFPoly& P, const std::vector<TFPoly>& Q, int k, int p,
                                const Frequency& freq) {
  ReducedField X;
  const int dim = c.dim(), M = c.max_mode(), D = P.max_degree();
  X.data.x = TFPoly(dim, M, D);
  X.data.x.add(0, 1, c);
  X.data.y = P;
  X.data.theta = Q;
  X.k = k;
  X.p = p;
  X.freq = freq;
  validate_reduced_field(X);
  return X;
}

ReducedMap reduce_general_map(const GeneralMap& G, ReductionRecord* record) {
  const int dim = G.data.x.dim(), M = G.data.x.max_mode(), D = G.data.x.max_degree();
  const FourierSeries one = FourierSeries::constant(dim, M, 1);
  TaylorFourierData data = G.data;
  if (!data.x.find(1, 0) || !is_const_one(*data.x.find(1, 0)))
    throw structure("general map: the x coefficient of the first component must be exactly 1");
  if (!data.y.find(0, 1) || !is_const_one(*data.y.find(0, 1)))
    throw structure("general map: the y coefficient of the second component must be exactly 1");

  bool flipped = false;
  if (average(data.x.get(0, 1)) < 0) {
    // conjugate by (x, y) -> (x, -y)
    TFPoly nx = flip_y(data.x, false);
    nx.set(1, 0, one);
    TFPoly ny = flip_y(data.y, true);
    ny.set(0, 1, one);
    data.x = nx;
    data.y = ny;
    for (auto& t : data.theta) t = flip_y(t, false);
    flipped = true;
  }
  const FourierSeries c = data.x.get(0, 1);
  const FourierSeries ic = reciprocal(c);

  TFPoly f1 = data.x;
  f1.erase(1, 0);
  f1.erase(0, 1);
  for (const auto& kv : f1.terms())
    if (kv.first.first + kv.first.second < 2) throw structure("general map: f1 must be nonlinear");
  const TFPoly h = f1 * ic;

  const TFPoly X = TFPoly::var_x(dim, M, D);
  const TFPoly Yt = TFPoly::var_y(dim, M, D);
  const std::vector<TFPoly> none;

  // y = Psi(x, ytilde, theta) solves ytilde = y + h(x, y, theta)
  TFPoly psi = Yt;
  for (int it = 0; it <= D; ++it) psi = Yt - substitute(h, X, psi, none);

  TFPoly Y1 = substitute(data.y, X, psi, none);
  std::vector<TFPoly> T1;
  for (const auto& t : data.theta) T1.push_back(substitute(t, X, psi, none));
  TFPoly X1 = X;
  X1.add(0, 1, c);  // x + c ytilde

  const TFPoly hs = tfpoly_shift(h, G.freq.omega);
  TFPoly ynew = Y1 + substitute(hs, X1, Y1, T1);

  const Real tol = Real(1e-26) * std::max(Real(1), scale_of(ynew));
  ynew.prune(tol);
  for (auto& t : T1) t.prune(Real(1e-26) * std::max(Real(1), scale_of(t)));
  // the identity coefficient may pick up rounding; restore it when it is 1 to tolerance
  if (ynew.find(0, 1)) {
    FourierSeries e = ynew.get(0, 1) - one;
    if (e.sup_coeff() > tol) throw structure("reduced map: y coefficient of the second component is not 1");
    ynew.set(0, 1, one);
  }

  ReducedMap F;
  F.data.x = TFPoly(dim, M, D);
  F.data.x.add(1, 0, one);
  F.data.x.add(0, 1, c);
  F.data.y = ynew;
  F.data.theta = T1;
  F.k = G.k;
  F.p = G.p;
  F.freq = G.freq;
  // remove terms below the remainder pattern that vanish to rounding
  for (auto it = F.data.y.terms().begin(); it != F.data.y.terms().end();) {
    auto e = it->first;
    ++it;
    if (e != Exponent{0, 1} && e != Exponent{G.k, 0} && !allowed_remainder(e, G.k) &&
        F.data.y.get(e.first, e.second).sup_coeff() <= tol)
      F.data.y.erase(e.first, e.second);
  }
  validate_reduced_map(F);
  if (record) {
    record->flipped_y = flipped;
    record->h = h;
  }
  return F;
}

MapInverse invert_reduced_map(const ReducedMap& F, int N) {
  const int dim = F.data.x.dim(), M = F.data.x.max_mode();
  const FourierSeries c = F.c();
  if (!(qabs(average(c)) > oscillatory(c).wiener_norm()))
    throw HypothesisError("CNotInvertible", "c(theta) may vanish; the reduced map is not invertible");
  std::vector<Real> back = F.freq.omega;
  for (auto& v : back) v = -v;

  TFPoly P = F.data.y;
  P.erase(0, 1);
  TFPoly cy(dim, M, N);
  cy.add(0, 1, c);
  const TFPoly Ps = tfpoly_shift(P, back), cys = tfpoly_shift(cy, back);
  std::vector<TFPoly> Qs;
  for (const auto& q : F.data.theta) Qs.push_back(tfpoly_shift(q, back));

  const TFPoly x = TFPoly::var_x(dim, M, N), y = TFPoly::var_y(dim, M, N);
  TFPoly X = x, Y = y;
  std::vector<TFPoly> Th(F.data.theta.size(), TFPoly(dim, M, N));
  for (int it = 0; it <= N + 1; ++it) {
    std::vector<TFPoly> Tn;
    for (const auto& q : Qs) Tn.push_back(substitute(q, X, Y, Th) * Real(-1));
    TFPoly Yn = y - substitute(Ps, X, Y, Th);
    TFPoly Xn = x - substitute(cys, X, Yn, Th);
    X = Xn;
    Y = Yn;
    Th = Tn;
  }
  MapInverse inv;
  inv.data.x = X;
  inv.data.y = Y;
  inv.data.theta = Th;
  inv.freq = F.freq;
  return inv;
}

Point3 apply_map(const ReducedMap& F, const Point3& z) {
  Point3 r;
  r.x = F.data.x.eval(z.x, z.y, z.theta);
  r.y = F.data.y.eval(z.x, z.y, z.theta);
  r.theta = z.theta;
  for (int i = 0; i < F.data.angle_dim(); ++i)
    r.theta[i] = z.theta[i] + F.freq.omega[i] + F.data.theta[i].eval(z.x, z.y, z.theta);
  return r;
}

Point3 apply_general_map(const GeneralMap& F, const Point3& z) {
  Point3 r;
  r.x = F.data.x.eval(z.x, z.y, z.theta);
  r.y = F.data.y.eval(z.x, z.y, z.theta);
  r.theta = z.theta;
  for (int i = 0; i < F.data.angle_dim(); ++i)
    r.theta[i] = z.theta[i] + F.freq.omega[i] + F.data.theta[i].eval(z.x, z.y, z.theta);
  return r;
}

Point3 apply_inverse(const MapInverse& Fi, const Point3& z) {
  Point3 r;
  r.x = Fi.data.x.eval(z.x, z.y, z.theta);
  r.y = Fi.data.y.eval(z.x, z.y, z.theta);
  r.theta = z.theta;
  for (int i = 0; i < Fi.data.angle_dim(); ++i)
    r.theta[i] = z.theta[i] - Fi.freq.omega[i] + Fi.data.theta[i].eval(z.x, z.y, z.theta);
  return r;
}

Point3 eval_field(const ReducedField& X, const Point3& z) {
  Point3 r;
  r.x = X.data.x.eval(z.x, z.y, z.theta);
  r.y = X.data.y.eval(z.x, z.y, z.theta);
  r.theta.assign(X.freq.torus_dim(), Real(0));
  for (int i = 0; i < X.freq.d(); ++i) r.theta[i] = X.freq.omega[i] + X.data.theta[i].eval(z.x, z.y, z.theta);
  for (int j = 0; j < X.freq.dprime(); ++j) r.theta[X.freq.d() + j] = X.freq.nu[j];
  return r;
}

}  // namespace ptori
