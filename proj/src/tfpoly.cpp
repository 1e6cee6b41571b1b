#include "ptori/tfpoly.hpp"

#include <algorithm>

#include "ptori/errors.hpp"

namespace ptori {

TFPoly::TFPoly(int dim, int max_mode, int max_degree)
    : dim_(dim), max_mode_(max_mode), max_degree_(max_degree) {}

const FourierSeries* TFPoly::find(int l, int m) const {
  auto it = terms_.find({l, m});
  return it == terms_.end() ? nullptr : &it->second;
}

FourierSeries TFPoly::get(int l, int m) const {
  const FourierSeries* s = find(l, m);
  return s ? *s : FourierSeries(dim_, max_mode_);
}

void TFPoly::add(int l, int m, const FourierSeries& s) {
  if (l < 0 || m < 0) throw DimensionMismatch("tfpoly: negative exponent");
  if (l + m > max_degree_ || s.is_zero()) return;
  if (s.dim() != dim_) throw DimensionMismatch("tfpoly: coefficient torus dimension differs");
  auto it = terms_.find({l, m});
  if (it == terms_.end()) {
    terms_.emplace(Exponent{l, m}, s);
    return;
  }
  it->second += s;
  if (it->second.is_zero()) terms_.erase(it);
}

void TFPoly::set(int l, int m, const FourierSeries& s) {
  terms_.erase({l, m});
  add(l, m, s);
}

void TFPoly::prune(Real tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (it->second.sup_coeff() <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
}

int TFPoly::max_l() const {
  int r = 0;
  for (const auto& kv : terms_) r = std::max(r, kv.first.first);
  return r;
}

int TFPoly::max_m() const {
  int r = 0;
  for (const auto& kv : terms_) r = std::max(r, kv.first.second);
  return r;
}

int TFPoly::valuation() const {
  int v = max_degree_ + 1;
  for (const auto& kv : terms_) v = std::min(v, kv.first.first + kv.first.second);
  return v;
}

Real TFPoly::eval(Real x, Real y, const std::vector<Real>& theta) const {
  Real s = 0;
  for (const auto& [lm, c] : terms_) {
    Real mono = 1;
    for (int i = 0; i < lm.first; ++i) mono *= x;
    for (int i = 0; i < lm.second; ++i) mono *= y;
    s += c.eval(theta) * mono;
  }
  return s;
}

TFPoly TFPoly::constant_like(const FourierSeries& s) const {
  TFPoly r = zero_like();
  r.add(0, 0, s);
  return r;
}

TFPoly TFPoly::var_x(int dim, int max_mode, int max_degree) {
  TFPoly r(dim, max_mode, max_degree);
  r.add(1, 0, FourierSeries::constant(dim, max_mode, 1));
  return r;
}

TFPoly TFPoly::var_y(int dim, int max_mode, int max_degree) {
  TFPoly r(dim, max_mode, max_degree);
  r.add(0, 1, FourierSeries::constant(dim, max_mode, 1));
  return r;
}

TFPoly& TFPoly::operator+=(const TFPoly& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("tfpoly: torus dimensions differ");
  for (const auto& [lm, c] : o.terms_) add(lm.first, lm.second, c);
  return *this;
}

TFPoly& TFPoly::operator-=(const TFPoly& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("tfpoly: torus dimensions differ");
  for (const auto& [lm, c] : o.terms_) add(lm.first, lm.second, -c);
  return *this;
}

TFPoly& TFPoly::operator*=(Real s) {
  if (s == 0) {
    terms_.clear();
    return *this;
  }
  for (auto& kv : terms_) kv.second *= s;
  return *this;
}

TFPoly operator+(TFPoly a, const TFPoly& b) { return a += b; }
TFPoly operator-(TFPoly a, const TFPoly& b) { return a -= b; }
TFPoly operator*(TFPoly a, Real s) { return a *= s; }

TFPoly operator*(const TFPoly& a, const TFPoly& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("tfpoly: torus dimensions differ");
  TFPoly r(a.dim(), std::max(a.max_mode(), b.max_mode()), std::min(a.max_degree(), b.max_degree()));
  for (const auto& [la, ca] : a.terms())
    for (const auto& [lb, cb] : b.terms()) {
      const int l = la.first + lb.first, m = la.second + lb.second;
      if (l + m > r.max_degree()) continue;
      r.add(l, m, mul(ca, cb));
    }
  return r;
}

TFPoly operator*(const TFPoly& a, const FourierSeries& s) {
  TFPoly r = a.zero_like();
  if (s.is_zero()) return r;
  for (const auto& [lm, c] : a.terms()) r.add(lm.first, lm.second, mul(c, s));
  return r;
}

TFPoly tfpoly_shift(const TFPoly& f, const std::vector<Real>& delta) {
  TFPoly r = f.zero_like();
  for (const auto& [lm, c] : f.terms()) r.add(lm.first, lm.second, shift(c, delta));
  return r;
}

TFPoly tfpoly_reflect(const TFPoly& f) {
  TFPoly r = f.zero_like();
  for (const auto& [lm, c] : f.terms()) r.add(lm.first, lm.second, reflect(c));
  return r;
}

SubstitutedComponents substitute_map(const TaylorFourierData& F, const TFJet& Kx, const TFJet& Ky,
                                     const std::vector<TFJet>& Ktheta, int N) {
  if (static_cast<int>(Ktheta.size()) != F.angle_dim())
    throw DimensionMismatch("substitute_map: number of angle components differs from the data");
  if (Kx.max_order() < N || Ky.max_order() < N)
    throw Error("TruncationTooLow", ExitCode::internal,
                "substitute_map: jets are truncated below the requested order " + std::to_string(N));
  for (const auto& t : Ktheta)
    if (t.max_order() < N)
      throw Error("TruncationTooLow", ExitCode::internal,
                  "substitute_map: angle jets are truncated below the requested order");
  TFJet X = Kx.with_max_order(N), Y = Ky.with_max_order(N);
  X.set_angle(false);
  Y.set_angle(false);
  std::vector<TFJet> delta;
  for (const auto& t : Ktheta) {
    TFJet d = t.with_max_order(N);
    d.set_angle(false);
    delta.push_back(d);
  }
  SubstitutedComponents out;
  out.x = substitute(F.x, X, Y, delta);
  out.y = substitute(F.y, X, Y, delta);
  for (const auto& q : F.theta) {
    TFJet t = substitute(q, X, Y, delta);
    t.set_angle(true);
    out.theta.push_back(t);
  }
  return out;
}

}  // namespace ptori
