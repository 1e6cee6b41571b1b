#pragma once

#include <vector>

#include "ptori/fourier.hpp"
#include "ptori/upoly.hpp"

namespace ptori {

// Power series in u truncated at max_order, with FourierSeries coefficients.
// Angle components keep only the tail (theta subtracted).
class TFJet {
 public:
  TFJet() = default;
  TFJet(int dim, int max_mode, int max_order, bool angle = false);

  static TFJet monomial(int dim, int max_mode, int max_order, int order, const FourierSeries& c);

  int dim() const { return dim_; }
  int max_mode() const { return max_mode_; }
  int max_order() const { return static_cast<int>(c_.size()) - 1; }
  bool angle() const { return angle_; }
  void set_angle(bool a) { angle_ = a; }

  // lowest order with a nonzero coefficient; max_order()+1 when the jet is zero
  int min_order() const;
  bool is_zero() const { return min_order() > max_order(); }

  const FourierSeries& coeff(int i) const;
  void set_coeff(int i, const FourierSeries& s);
  void add_coeff(int i, const FourierSeries& s);

  TFJet with_max_order(int N) const;

  Real eval(Real u, const std::vector<Real>& theta) const;

  // interface shared with TFPoly for generic substitution
  int valuation() const { return min_order(); }
  int truncation() const { return max_order(); }
  TFJet constant_like(const FourierSeries& s) const;
  TFJet zero_like() const { return TFJet(dim_, max_mode_, max_order(), false); }

  TFJet& operator+=(const TFJet& o);
  TFJet& operator-=(const TFJet& o);
  TFJet& operator*=(Real s);

 private:
  int dim_ = 0;
  int max_mode_ = 0;
  bool angle_ = false;
  std::vector<FourierSeries> c_;
};

TFJet operator+(TFJet a, const TFJet& b);
TFJet operator-(TFJet a, const TFJet& b);
TFJet operator*(TFJet a, Real s);
TFJet operator*(const TFJet& a, const TFJet& b);
TFJet operator*(const TFJet& a, const FourierSeries& s);

TFJet jet_mul(const TFJet& a, const TFJet& b);
TFJet jet_pow(const TFJet& a, int e);
// jet times a real polynomial in u
TFJet jet_mul_poly(const TFJet& a, const UPoly& r);
// f(r(u), theta + shift_by)
TFJet compose_inner(const TFJet& f, const UPoly& r, const std::vector<Real>& shift_by);
TFJet jet_derivative_u(const TFJet& f);
TFJet jet_derivative_theta(const TFJet& f, int axis);
Real jet_eval(const TFJet& f, Real u, const std::vector<Real>& theta);
// coefficient-wise average / oscillatory split
TFJet jet_shift(const TFJet& f, const std::vector<Real>& delta);

}  // namespace ptori
