#pragma once

#include <string>
#include <vector>

#include "ptori/fourier.hpp"
#include "ptori/tfpoly.hpp"

namespace ptori {

// F(x,y,theta) = (x + c y, y + a_k x^k + A, theta + omega + d_p x^p + B).
// data.x = {(1,0): 1, (0,1): c}, data.y = {(0,1): 1, (k,0): a_k, A...}, data.theta[i] = {(p,0): d_p, B...}
struct ReducedMap {
  TaylorFourierData data;
  int k = 2;
  int p = 1;
  Frequency freq;

  FourierSeries c() const { return data.x.get(0, 1); }
  FourierSeries a_k() const { return data.y.get(k, 0); }
  FourierSeries d_p(int i) const { return data.theta[i].get(p, 0); }
};

// X(x,y,theta,tau) = (c y, a_k x^k + A, omega + d_p x^p + B) on T^{d+d'}.
// data.x = {(0,1): c}, data.y = {(k,0): a_k, A...}, data.theta[i] = {(p,0): d_p, B...}
struct ReducedField {
  TaylorFourierData data;
  int k = 2;
  int p = 1;
  Frequency freq;

  FourierSeries c() const { return data.x.get(0, 1); }
  FourierSeries a_k() const { return data.y.get(k, 0); }
  FourierSeries d_p(int i) const { return data.theta[i].get(p, 0); }
};

// Map data before the first component is cleared of nonlinear terms:
// F = (x + c y + f1, y + f2, theta + omega + f3).
struct GeneralMap {
  TaylorFourierData data;  // data.x includes (1,0): 1 and (0,1): c
  int k = 2;
  int p = 1;
  Frequency freq;
};

// Inverse of a reduced map: F^{-1}(x,y,theta) = (X, Y, theta - omega + Theta).
struct MapInverse {
  TaylorFourierData data;  // data.theta holds Theta
  Frequency freq;
};

// Throws StructureViolation / HypothesisViolated.
void validate_reduced_map(const ReducedMap& F, bool require_positive_a = false);
void validate_reduced_field(const ReducedField& X, bool require_positive_a = false);

// Convenience builder: P holds a_k x^k + A, Q[i] holds d_p x^p + B.
ReducedMap make_reduced_map(const FourierSeries& c, const TFPoly& P, const std::vector<TFPoly>& Q, int k, int p,
                            const Frequency& freq);
ReducedField make_reduced_field(const FourierSeries& c, const TFPoly& P, const std::vector<TFPoly>& Q, int k, int p,
                                const Frequency& freq);

struct ReductionRecord {
  bool flipped_y = false;
  TFPoly h;  // ytilde = y + h(x, y, theta) (after the optional flip)
};

ReducedMap reduce_general_map(const GeneralMap& G, ReductionRecord* record = nullptr);

MapInverse invert_reduced_map(const ReducedMap& F, int N);

// Pointwise evaluation helpers (quad precision).
struct Point3 {
  Real x = 0;
  Real y = 0;
  std::vector<Real> theta;  // full angles (not tails); for fields includes tau
};
Point3 apply_map(const ReducedMap& F, const Point3& z);
Point3 apply_general_map(const GeneralMap& F, const Point3& z);
Point3 apply_inverse(const MapInverse& Fi, const Point3& z);
// Vector field value; the theta slots hold dtheta/dt including omega
Point3 eval_field(const ReducedField& X, const Point3& z);

}  // namespace ptori
