#include "ptori/jets.hpp"

#include <algorithm>

#include "ptori/errors.hpp"

namespace ptori {

TFJet::TFJet(int dim, int max_mode, int max_order, bool angle)
    : dim_(dim), max_mode_(max_mode), angle_(angle) {
  if (max_order < 0) throw DimensionMismatch("jet: negative truncation order");
  c_.assign(max_order + 1, FourierSeries(dim, max_mode));
}

TFJet TFJet::monomial(int dim, int max_mode, int max_order, int order, const FourierSeries& c) {
  TFJet j(dim, max_mode, max_order);
  if (order <= max_order) j.set_coeff(order, c);
  return j;
}

int TFJet::min_order() const {
  for (int i = 0; i < static_cast<int>(c_.size()); ++i)
    if (!c_[i].is_zero()) return i;
  return static_cast<int>(c_.size());
}

const FourierSeries& TFJet::coeff(int i) const {
  static thread_local FourierSeries empty;
  if (i < 0 || i > max_order()) {
    empty = FourierSeries(dim_, max_mode_);
    return empty;
  }
  return c_[i];
}

void TFJet::set_coeff(int i, const FourierSeries& s) {
  if (i < 0 || i > max_order()) return;
  if (s.dim() != dim_) throw DimensionMismatch("jet: coefficient torus dimension differs");
  c_[i] = s;
}

void TFJet::add_coeff(int i, const FourierSeries& s) {
  if (i < 0 || i > max_order()) return;
  if (s.dim() != dim_) throw DimensionMismatch("jet: coefficient torus dimension differs");
  c_[i] += s;
}

TFJet TFJet::with_max_order(int N) const {
  TFJet r(dim_, max_mode_, N, angle_);
  for (int i = 0; i <= std::min(N, max_order()); ++i) r.c_[i] = c_[i];
  return r;
}

Real TFJet::eval(Real u, const std::vector<Real>& theta) const {
  Real s = 0;
  for (int i = max_order(); i >= 0; --i) s = s * u + (c_[i].is_zero() ? Real(0) : c_[i].eval(theta));
  return s;
}

TFJet TFJet::constant_like(const FourierSeries& s) const {
  TFJet r(dim_, max_mode_, max_order());
  r.set_coeff(0, s);
  return r;
}

TFJet& TFJet::operator+=(const TFJet& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("jet: torus dimensions differ");
  const int n = std::min(max_order(), o.max_order());
  for (int i = 0; i <= n; ++i)
    if (!o.c_[i].is_zero()) c_[i] += o.c_[i];
  return *this;
}

TFJet& TFJet::operator-=(const TFJet& o) {
  if (o.dim_ != dim_) throw DimensionMismatch("jet: torus dimensions differ");
  const int n = std::min(max_order(), o.max_order());
  for (int i = 0; i <= n; ++i)
    if (!o.c_[i].is_zero()) c_[i] -= o.c_[i];
  return *this;
}

TFJet& TFJet::operator*=(Real s) {
  for (auto& c : c_) c *= s;
  return *this;
}

TFJet operator+(TFJet a, const TFJet& b) { return a += b; }
TFJet operator-(TFJet a, const TFJet& b) { return a -= b; }
TFJet operator*(TFJet a, Real s) { return a *= s; }
TFJet operator*(const TFJet& a, const TFJet& b) { return jet_mul(a, b); }

TFJet operator*(const TFJet& a, const FourierSeries& s) {
  TFJet r(a.dim(), a.max_mode(), a.max_order());
  if (s.is_zero()) return r;
  for (int i = a.min_order(); i <= a.max_order(); ++i)
    if (!a.coeff(i).is_zero()) r.set_coeff(i, mul(a.coeff(i), s));
  return r;
}

TFJet jet_mul(const TFJet& a, const TFJet& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("jet: torus dimensions differ");
  const int N = std::min(a.max_order(), b.max_order());
  TFJet r(a.dim(), std::max(a.max_mode(), b.max_mode()), N);
  const int ma = a.min_order(), mb = b.min_order();
  for (int i = ma; i <= N - mb; ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int j = mb; j <= N - i; ++j) {
      if (b.coeff(j).is_zero()) continue;
      r.add_coeff(i + j, mul(a.coeff(i), b.coeff(j)));
    }
  }
  return r;
}

TFJet jet_pow(const TFJet& a, int e) {
  if (e < 0) throw DimensionMismatch("jet: negative power");
  TFJet r = a.constant_like(FourierSeries::constant(a.dim(), a.max_mode(), 1));
  TFJet base = a;
  base.set_angle(false);
  while (e > 0) {
    if (e & 1) r = jet_mul(r, base);
    e >>= 1;
    if (e) base = jet_mul(base, base);
  }
  return r;
}

TFJet jet_mul_poly(const TFJet& a, const UPoly& r) {
  const int N = a.max_order();
  TFJet out(a.dim(), a.max_mode(), N);
  for (int i = a.min_order(); i <= N; ++i) {
    if (a.coeff(i).is_zero()) continue;
    for (int j = 0; j <= std::min(r.degree(), N - i); ++j) {
      if (r.coeff(j) == 0) continue;
      out.add_coeff(i + j, a.coeff(i) * r.coeff(j));
    }
  }
  return out;
}

TFJet compose_inner(const TFJet& f, const UPoly& r, const std::vector<Real>& shift_by) {
  if (r.coeff(0) != 0 || r.coeff(1) == 0)
    throw DimensionMismatch("jet: inner polynomial must vanish at 0 with nonzero slope");
  const int N = f.max_order();
  TFJet out(f.dim(), f.max_mode(), N, f.angle());
  UPoly rp(std::vector<Real>{1});
  for (int i = 0; i <= N; ++i) {
    if (i > 0) rp = poly_mul(rp, r, N);
    if (f.coeff(i).is_zero()) continue;
    FourierSeries fs = shift_by.empty() ? f.coeff(i) : shift(f.coeff(i), shift_by);
    for (int j = i; j <= N; ++j) {
      if (rp.coeff(j) == 0) continue;
      out.add_coeff(j, fs * rp.coeff(j));
    }
  }
  return out;
}

TFJet jet_derivative_u(const TFJet& f) {
  TFJet out(f.dim(), f.max_mode(), f.max_order());
  for (int i = 1; i <= f.max_order(); ++i)
    if (!f.coeff(i).is_zero()) out.set_coeff(i - 1, f.coeff(i) * Real(i));
  return out;
}

TFJet jet_derivative_theta(const TFJet& f, int axis) {
  TFJet out(f.dim(), f.max_mode(), f.max_order());
  for (int i = 0; i <= f.max_order(); ++i)
    if (!f.coeff(i).is_zero()) out.set_coeff(i, diff_theta(f.coeff(i), axis));
  return out;
}

Real jet_eval(const TFJet& f, Real u, const std::vector<Real>& theta) { return f.eval(u, theta); }

TFJet jet_shift(const TFJet& f, const std::vector<Real>& delta) {
  TFJet out(f.dim(), f.max_mode(), f.max_order(), f.angle());
  for (int i = 0; i <= f.max_order(); ++i)
    if (!f.coeff(i).is_zero()) out.set_coeff(i, shift(f.coeff(i), delta));
  return out;
}

}  // namespace ptori
