#pragma once

#include "ptori/reduced.hpp"
#include "ptori/scalar.hpp"
#include "ptori/tfpoly.hpp"

// Problems shared by the unit tests and the acceptance binary.
namespace problems {

using namespace ptori;

inline Real golden() { return (qsqrt(Real(5)) - 1) / 2; }

// x' = x + c y, y' = y + a_k x^k + ..., theta' = theta + omega + d_p x^p
struct MapData {
  FourierSeries c;
  FourierSeries a;
  FourierSeries d;
  int k = 2;
  int p = 1;
  int M = 32;
  int degree = 20;
};

// c = 1 + 0.1 cos, a_2 = 6 + cos, d_1 = 1
inline MapData reference_data(int dim = 1, int M = 32) {
  MapData m;
  m.M = M;
  Mode e(dim, 0);
  e[0] = 1;
  m.c = FourierSeries::constant(dim, M, 1) + FourierSeries::cosine(dim, M, e, Real(0.1));
  m.a = FourierSeries::constant(dim, M, 6) + FourierSeries::cosine(dim, M, e, 1);
  m.d = FourierSeries::constant(dim, M, 1);
  return m;
}

inline void build(const MapData& m, TFPoly& P, std::vector<TFPoly>& Q) {
  const int dim = m.c.dim();
  P = TFPoly(dim, m.M, m.degree);
  P.add(m.k, 0, m.a);
  Q.assign(1, TFPoly(dim, m.M, m.degree));
  Q[0].add(m.p, 0, m.d);
}

inline ReducedMap reference_map(const MapData& m = reference_data()) {
  TFPoly P;
  std::vector<TFPoly> Q;
  build(m, P, Q);
  Frequency f;
  f.omega = {golden()};
  return make_reduced_map(m.c, P, Q, m.k, m.p, f);
}

// the same data as a field on T^2 with nu = sqrt 2
inline ReducedField reference_field(int M = 8) {
  const MapData m = reference_data(2, M);
  TFPoly P;
  std::vector<TFPoly> Q;
  build(m, P, Q);
  Frequency f;
  f.omega = {golden()};
  f.nu = {qsqrt(Real(2))};
  return make_reduced_field(m.c, P, Q, m.k, m.p, f);
}

}  // namespace problems
