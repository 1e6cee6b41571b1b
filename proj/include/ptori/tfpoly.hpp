#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ptori/jets.hpp"

namespace ptori {

using Exponent = std::pair<int, int>;  // (l, m) for x^l y^m

// Polynomial in (x, y) with FourierSeries coefficients, truncated at total degree max_degree.
class TFPoly {
 public:
  TFPoly() = default;
  TFPoly(int dim, int max_mode, int max_degree);

  int dim() const { return dim_; }
  int max_mode() const { return max_mode_; }
  int max_degree() const { return max_degree_; }

  const std::map<Exponent, FourierSeries>& terms() const { return terms_; }
  // nullptr when absent
  const FourierSeries* find(int l, int m) const;
  FourierSeries get(int l, int m) const;
  void add(int l, int m, const FourierSeries& s);
  void set(int l, int m, const FourierSeries& s);
  void erase(int l, int m) { terms_.erase({l, m}); }
  // drop terms whose coefficients are all below tol in modulus
  void prune(Real tol);
  int max_l() const;
  int max_m() const;

  Real eval(Real x, Real y, const std::vector<Real>& theta) const;

  // interface shared with TFJet for generic substitution
  int valuation() const;
  int truncation() const { return max_degree_; }
  bool is_zero() const { return terms_.empty(); }
  TFPoly constant_like(const FourierSeries& s) const;
  TFPoly zero_like() const { return TFPoly(dim_, max_mode_, max_degree_); }

  static TFPoly var_x(int dim, int max_mode, int max_degree);
  static TFPoly var_y(int dim, int max_mode, int max_degree);

  TFPoly& operator+=(const TFPoly& o);
  TFPoly& operator-=(const TFPoly& o);
  TFPoly& operator*=(Real s);

 private:
  int dim_ = 0;
  int max_mode_ = 0;
  int max_degree_ = 0;
  std::map<Exponent, FourierSeries> terms_;
};

TFPoly operator+(TFPoly a, const TFPoly& b);
TFPoly operator-(TFPoly a, const TFPoly& b);
TFPoly operator*(TFPoly a, Real s);
TFPoly operator*(const TFPoly& a, const TFPoly& b);
TFPoly operator*(const TFPoly& a, const FourierSeries& s);
TFPoly tfpoly_shift(const TFPoly& f, const std::vector<Real>& delta);
TFPoly tfpoly_reflect(const TFPoly& f);

// Components of a map or vector field in (x, y, theta). For maps the theta
// components exclude theta + omega; for fields they exclude omega.
struct TaylorFourierData {
  TFPoly x;
  TFPoly y;
  std::vector<TFPoly> theta;
  int angle_dim() const { return static_cast<int>(theta.size()); }
  int torus_dim() const { return x.dim(); }
  int max_mode() const { return x.max_mode(); }
  int max_degree() const { return x.max_degree(); }
};

// sum over (l,m) of f_lm(theta + delta) X^l Y^m, with delta acting on the
// first delta.size() angles and expanded in Taylor series.
template <class A>
A substitute(const TFPoly& f, const A& X, const A& Y, const std::vector<A>& delta);

struct SubstitutedComponents {
  TFJet x;
  TFJet y;
  std::vector<TFJet> theta;
};

// F evaluated on K = (K^x, K^y, theta + tail) to order N
SubstitutedComponents substitute_map(const TaylorFourierData& F, const TFJet& Kx, const TFJet& Ky,
                                     const std::vector<TFJet>& Ktheta, int N);

}  // namespace ptori

#include "ptori/detail/substitute_impl.hpp"
