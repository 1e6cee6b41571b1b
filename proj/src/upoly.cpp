#include "ptori/upoly.hpp"

#include <algorithm>

#include "ptori/errors.hpp"

namespace ptori {

UPoly UPoly::tangent(int k, Real lead) {
  std::vector<Real> c(k + 1, Real(0));
  c[1] = 1;
  c[k] = lead;
  return UPoly(std::move(c));
}

void UPoly::set(int i, Real v) {
  if (i < 0) return;
  if (i >= static_cast<int>(c_.size())) c_.resize(i + 1, Real(0));
  c_[i] = v;
}

bool UPoly::is_tangent_to_identity() const { return coeff(0) == 0 && coeff(1) == 1; }

int UPoly::leading_index() const {
  for (int i = 2; i < static_cast<int>(c_.size()); ++i)
    if (c_[i] != 0) return i;
  return 0;
}

Real UPoly::eval(Real u) const {
  Real s = 0;
  for (int i = degree(); i >= 0; --i) s = s * u + c_[i];
  return s;
}

Complex UPoly::eval(Complex u) const {
  Complex s(0, 0);
  for (int i = degree(); i >= 0; --i) s = s * u + c_[i];
  return s;
}

ComplexD UPoly::eval_double(ComplexD u) const {
  ComplexD s(0, 0);
  for (int i = degree(); i >= 0; --i) s = s * u + to_double(c_[i]);
  return s;
}

UPoly UPoly::derivative() const {
  std::vector<Real> d(std::max(1, degree()), Real(0));
  for (int i = 1; i <= degree(); ++i) d[i - 1] = i * c_[i];
  return UPoly(std::move(d));
}

UPoly poly_mul(const UPoly& a, const UPoly& b, int N) {
  std::vector<Real> c(N + 1, Real(0));
  for (int i = 0; i <= std::min(a.degree(), N); ++i) {
    if (a.coeff(i) == 0) continue;
    for (int j = 0; j <= std::min(b.degree(), N - i); ++j) c[i + j] += a.coeff(i) * b.coeff(j);
  }
  return UPoly(std::move(c));
}

UPoly poly_compose(const UPoly& a, const UPoly& b, int N) {
  if (b.coeff(0) != 0) throw Error("PolyCompose", ExitCode::internal, "inner polynomial must vanish at 0");
  // Horner
  UPoly s(std::vector<Real>{a.coeff(std::min(a.degree(), N))});
  for (int i = std::min(a.degree(), N) - 1; i >= 0; --i) {
    s = poly_mul(s, b, N);
    s.set(0, s.coeff(0) + a.coeff(i));
  }
  std::vector<Real> c(N + 1, Real(0));
  for (int i = 0; i <= N; ++i) c[i] = s.coeff(i);
  return UPoly(std::move(c));
}

UPoly poly_reversion(const UPoly& r, int N) {
  if (!r.is_tangent_to_identity())
    throw Error("PolyReversion", ExitCode::internal, "reversion requires a tangent-to-identity polynomial");
  // s <- u - (r(s) - s); each pass fixes one more order
  UPoly nonlin = r;
  nonlin.set(1, 0);
  UPoly s(std::vector<Real>{0, 1});
  for (int it = 0; it < N; ++it) {
    UPoly t = poly_compose(nonlin, s, N);
    std::vector<Real> c(N + 1, Real(0));
    c[1] = 1;
    for (int i = 0; i <= N; ++i) c[i] -= t.coeff(i);
    s = UPoly(std::move(c));
  }
  return s;
}

}  // namespace ptori
