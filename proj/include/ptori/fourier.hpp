#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "ptori/scalar.hpp"

namespace ptori {

using Mode = std::vector<int>;

struct Frequency {
  std::vector<Real> omega;
  std::vector<Real> nu;
  Real diophantine_floor = Real(1e-12);

  int d() const { return static_cast<int>(omega.size()); }
  int dprime() const { return static_cast<int>(nu.size()); }
  int torus_dim() const { return d() + dprime(); }
  // (omega, nu) concatenated
  std::vector<Real> all() const;
};

// Real-valued truncated Fourier series on T^dim, |k|_inf <= max_mode.
// Only the half k >= 0 (lexicographic) is stored; c_{-k} = conj(c_k).
class FourierSeries {
 public:
  using Key = std::uint64_t;

  FourierSeries() = default;
  FourierSeries(int dim, int max_mode);

  static FourierSeries constant(int dim, int max_mode, Real value);
  // amp * cos(2 pi k.theta)
  static FourierSeries cosine(int dim, int max_mode, const Mode& k, Real amp);
  // amp * sin(2 pi k.theta)
  static FourierSeries sine(int dim, int max_mode, const Mode& k, Real amp);

  int dim() const { return dim_; }
  int max_mode() const { return max_mode_; }
  bool is_zero() const { return coeffs_.empty(); }
  std::size_t size() const { return coeffs_.size(); }

  Complex coeff(const Mode& k) const;
  // Sets c_k (and implicitly c_{-k}). For k = 0 the imaginary part is dropped.
  void set(const Mode& k, Complex v);
  void add_to(const Mode& k, Complex v);

  // max |c_k|
  Real sup_coeff() const;
  // sum over all k of |c_k|, an upper bound for the sup norm
  Real wiener_norm() const;
  Real eval(const std::vector<Real>& theta) const;

  FourierSeries& operator+=(const FourierSeries& o);
  FourierSeries& operator-=(const FourierSeries& o);
  FourierSeries& operator*=(Real s);

  // stored half, keyed by packed multi-index
  const std::map<Key, Complex>& half() const { return coeffs_; }
  Mode unpack(Key key) const;
  Key pack(const Mode& k) const;
  Key zero_key() const { return pack(Mode(dim_, 0)); }
  void set_key(Key key, Complex v);

  template <class Fn>
  void for_each_half(Fn fn) const {
    for (const auto& [key, c] : coeffs_) fn(unpack(key), c);
  }

 private:
  void check_mode(const Mode& k) const;

  int dim_ = 0;
  int max_mode_ = 0;
  std::map<Key, Complex> coeffs_;
};

bool is_nonneg(const Mode& k);
Mode negate(const Mode& k);

FourierSeries operator+(FourierSeries a, const FourierSeries& b);
FourierSeries operator-(FourierSeries a, const FourierSeries& b);
FourierSeries operator-(FourierSeries a);
FourierSeries operator*(FourierSeries a, Real s);
FourierSeries operator*(Real s, FourierSeries a);
FourierSeries operator*(const FourierSeries& a, const FourierSeries& b);

Real average(const FourierSeries& f);
FourierSeries oscillatory(const FourierSeries& f);
FourierSeries mul(const FourierSeries& f, const FourierSeries& g);
FourierSeries shift(const FourierSeries& f, const std::vector<Real>& delta);
FourierSeries diff_theta(const FourierSeries& f, int axis);
FourierSeries truncate_modes(const FourierSeries& f, int max_mode);
// Same function viewed on a larger torus (new axes appended).
FourierSeries embed(const FourierSeries& f, int new_dim);
// f(-theta)
FourierSeries reflect(const FourierSeries& f);
// 1/f by Neumann series around the mean; requires |mean| > wiener norm of the oscillation.
FourierSeries reciprocal(const FourierSeries& f, Real tol = Real(1e-30));

// phi(theta + omega) - phi(theta) = h
FourierSeries solve_sd_map(const FourierSeries& h, const Frequency& freq);
// d phi . (omega, nu) = h
FourierSeries solve_sd_flow(const FourierSeries& h, const Frequency& freq);

enum class Setting { map, flow };

struct MarginReport {
  Real margin = 0;
  Mode argmin;
};

// min over 0 < |k|_inf <= k_max of |1 - e^{2 pi i k.omega}| (map) or |2 pi k.(omega,nu)| (flow)
MarginReport diophantine_margin(const Frequency& freq, int k_max, Setting setting);

// divisor for mode k: e^{2 pi i k.omega} - 1 (map) or 2 pi i k.(omega,nu) (flow)
Complex sd_divisor(const Mode& k, const std::vector<Real>& freq, Setting setting);

}  // namespace ptori
