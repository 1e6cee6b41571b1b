#pragma once

#include <complex>
#include <cstdio>
#include <string>

#ifdef PTORI_DOUBLE_ONLY
#include <cmath>
#else
extern "C" {
#include <quadmath.h>
}
#endif

namespace ptori {

#ifdef PTORI_DOUBLE_ONLY
using Real = double;
#else
using Real = __float128;
#endif
using Complex = std::complex<Real>;
using ComplexD = std::complex<double>;

inline double to_double(Real x) { return static_cast<double>(x); }
inline ComplexD to_double(Complex z) {
  return {static_cast<double>(z.real()), static_cast<double>(z.imag())};
}
inline Complex to_complex(ComplexD z) { return {Real(z.real()), Real(z.imag())}; }

#ifdef PTORI_DOUBLE_ONLY
inline Real qsqrt(Real x) { return std::sqrt(x); }
inline Real qabs(Real x) { return std::fabs(x); }
inline Real qsin(Real x) { return std::sin(x); }
inline Real qcos(Real x) { return std::cos(x); }
inline Real qexp(Real x) { return std::exp(x); }
inline Real qlog(Real x) { return std::log(x); }
inline Real qpow(Real x, Real e) { return std::pow(x, e); }
inline Real qhypot(Real x, Real y) { return std::hypot(x, y); }
inline Real qatan2(Real y, Real x) { return std::atan2(y, x); }
inline Real qpi() { return 3.14159265358979323846; }
inline void qsincos(Real x, Real* s, Real* c) {
  *s = std::sin(x);
  *c = std::cos(x);
}
#else
inline Real qsqrt(Real x) { return sqrtq(x); }
inline Real qabs(Real x) { return fabsq(x); }
inline Real qsin(Real x) { return sinq(x); }
inline Real qcos(Real x) { return cosq(x); }
inline Real qexp(Real x) { return expq(x); }
inline Real qlog(Real x) { return logq(x); }
inline Real qpow(Real x, Real e) { return powq(x, e); }
inline Real qhypot(Real x, Real y) { return hypotq(x, y); }
inline Real qatan2(Real y, Real x) { return atan2q(y, x); }
inline Real qpi() { return M_PIq; }
inline void qsincos(Real x, Real* s, Real* c) { sincosq(x, s, c); }
#endif

inline Real qabs(Complex z) { return qhypot(z.real(), z.imag()); }

// e^{2 pi i x}
inline Complex cis2pi(Real x) {
  Real s, c;
  qsincos(2 * qpi() * x, &s, &c);
  return {c, s};
}

// e^{2 pi i x} - 1 without cancellation for small x
inline Complex cis2pi_m1(Real x) {
  Real s, c;
  qsincos(qpi() * x, &s, &c);
  // 2i sin(pi x) e^{i pi x}
  return {-2 * s * s, 2 * s * c};
}

inline std::string to_string(Real x) {
#ifdef PTORI_DOUBLE_ONLY
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
#else
  char buf[64];
  quadmath_snprintf(buf, sizeof buf, "%.33Qg", x);
  return buf;
#endif
}

}  // namespace ptori
