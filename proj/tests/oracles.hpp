#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "ptori/fourier.hpp"

namespace oracle {

using ptori::FourierSeries;
using ptori::Mode;
using ptori::Real;

// direct summation over both halves, in double, independent of FourierSeries::eval
inline double direct_eval(const FourierSeries& f, const std::vector<double>& theta) {
  std::complex<double> s = 0;
  f.for_each_half([&](const Mode& k, const ptori::Complex& c) {
    double ph = 0;
    for (std::size_t a = 0; a < k.size(); ++a) ph += k[a] * theta[a];
    std::complex<double> cd = ptori::to_double(c);
    std::complex<double> e = std::polar(1.0, 2 * M_PI * ph);
    bool zero = true;
    for (int v : k) zero = zero && v == 0;
    if (zero)
      s += cd;
    else
      s += cd * e + std::conj(cd * e);
  });
  return s.real();
}

inline std::vector<double> to_d(const std::vector<Real>& v) {
  std::vector<double> r;
  for (Real x : v) r.push_back(static_cast<double>(x));
  return r;
}

inline std::vector<Real> to_q(const std::vector<double>& v) {
  std::vector<Real> r;
  for (double x : v) r.push_back(x);
  return r;
}

// random real series on T^dim with modes |k|_inf <= kmax, decaying amplitudes
inline FourierSeries random_series(std::mt19937_64& rng, int dim, int M, int kmax, bool zero_mean = false,
                                   double decay = 0.7) {
  std::uniform_real_distribution<double> U(-1, 1);
  FourierSeries f(dim, M);
  Mode k(dim, -kmax);
  while (true) {
    if (ptori::is_nonneg(k)) {
      int norm = 0;
      for (int v : k) norm = std::max(norm, std::abs(v));
      double amp = std::pow(decay, norm);
      bool zero = norm == 0;
      if (!(zero && zero_mean)) f.set(k, ptori::Complex(amp * U(rng), zero ? 0.0 : amp * U(rng)));
    }
    int a = dim - 1;
    while (a >= 0 && k[a] == kmax) {
      k[a] = -kmax;
      --a;
    }
    if (a < 0) break;
    ++k[a];
  }
  return f;
}

// uniform grid point index -> theta
inline std::vector<std::vector<double>> grid(int dim, int n) {
  std::vector<std::vector<double>> pts;
  std::vector<int> idx(dim, 0);
  if (dim == 0) return {{}};
  while (true) {
    std::vector<double> p(dim);
    for (int a = 0; a < dim; ++a) p[a] = double(idx[a]) / n;
    pts.push_back(p);
    int a = dim - 1;
    while (a >= 0 && idx[a] == n - 1) {
      idx[a] = 0;
      --a;
    }
    if (a < 0) break;
    ++idx[a];
  }
  return pts;
}

inline double rel(double a, double b) { return std::fabs(a - b) / std::max(1e-300, std::fabs(b)); }

}  // namespace oracle
