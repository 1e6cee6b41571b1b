#pragma once

#include <vector>

#include "ptori/scalar.hpp"

namespace ptori {

// Real polynomial in one variable, coefficient c[i] of u^i.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Real> c) : c_(std::move(c)) {}
  // u + lead u^k
  static UPoly tangent(int k, Real lead);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  Real coeff(int i) const { return i >= 0 && i < static_cast<int>(c_.size()) ? c_[i] : Real(0); }
  void set(int i, Real v);
  const std::vector<Real>& coeffs() const { return c_; }

  bool is_tangent_to_identity() const;
  // lowest i >= 2 with nonzero coefficient, 0 if none
  int leading_index() const;

  Real eval(Real u) const;
  Complex eval(Complex u) const;
  ComplexD eval_double(ComplexD u) const;
  UPoly derivative() const;

 private:
  std::vector<Real> c_;
};

UPoly poly_mul(const UPoly& a, const UPoly& b, int N);
// a(b(u)) truncated at order N, b(0) = 0
UPoly poly_compose(const UPoly& a, const UPoly& b, int N);
// compositional inverse of a tangent-to-identity polynomial, truncated at N
UPoly poly_reversion(const UPoly& r, int N);

}  // namespace ptori
