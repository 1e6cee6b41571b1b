#include "ptori/fourier.hpp"

#include <algorithm>
#include <sstream>

#include "ptori/errors.hpp"

namespace ptori {

namespace {

constexpr int kBits = 16;
constexpr std::int64_t kOffset = 1 << (kBits - 1);
constexpr int kMaxDim = 4;

std::string mode_string(const Mode& k) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
  os << ")";
  return os.str();
}

void require_same_dim(const FourierSeries& a, const FourierSeries& b) {
  if (a.dim() != b.dim())
    throw DimensionMismatch("fourier: torus dimensions differ (" + std::to_string(a.dim()) +
                            " vs " + std::to_string(b.dim()) + ")");
}

}  // namespace

std::vector<Real> Frequency::all() const {
  std::vector<Real> v = omega;
  v.insert(v.end(), nu.begin(), nu.end());
  return v;
}

bool is_nonneg(const Mode& k) {
  for (int ki : k) {
    if (ki > 0) return true;
    if (ki < 0) return false;
  }
  return true;
}

Mode negate(const Mode& k) {
  Mode r(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) r[i] = -k[i];
  return r;
}

FourierSeries::FourierSeries(int dim, int max_mode) : dim_(dim), max_mode_(max_mode) {
  if (dim < 0 || dim > kMaxDim) throw DimensionMismatch("fourier: torus dimension out of range");
  if (max_mode < 0 || max_mode >= kOffset / 2) throw DimensionMismatch("fourier: max_mode out of range");
}

FourierSeries FourierSeries::constant(int dim, int max_mode, Real value) {
  FourierSeries f(dim, max_mode);
  f.set(Mode(dim, 0), value);
  return f;
}

FourierSeries FourierSeries::cosine(int dim, int max_mode, const Mode& k, Real amp) {
  FourierSeries f(dim, max_mode);
  Mode kk = is_nonneg(k) ? k : negate(k);
  bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
  if (zero)
    f.set(kk, amp);
  else
    f.set(kk, Complex(amp / 2, 0));
  return f;
}

FourierSeries FourierSeries::sine(int dim, int max_mode, const Mode& k, Real amp) {
  FourierSeries f(dim, max_mode);
  bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
  if (zero) return f;
  // sin(x) = (e^{ix} - e^{-ix}) / 2i, so c_k = -i amp/2
  if (is_nonneg(k))
    f.set(k, Complex(0, -amp / 2));
  else
    f.set(negate(k), Complex(0, amp / 2));
  return f;
}

FourierSeries::Key FourierSeries::pack(const Mode& k) const {
  Key key = 0;
  for (int i = 0; i < dim_; ++i) key = (key << kBits) | static_cast<Key>(k[i] + kOffset);
  return key;
}

Mode FourierSeries::unpack(Key key) const {
  Mode k(dim_);
  for (int i = dim_ - 1; i >= 0; --i) {
    k[i] = static_cast<int>(key & ((Key(1) << kBits) - 1)) - static_cast<int>(kOffset);
    key >>= kBits;
  }
  return k;
}

void FourierSeries::check_mode(const Mode& k) const {
  if (static_cast<int>(k.size()) != dim_)
    throw DimensionMismatch("fourier: mode " + mode_string(k) + " has wrong length");
}

Complex FourierSeries::coeff(const Mode& k) const {
  check_mode(k);
  for (int ki : k)
    if (std::abs(ki) > max_mode_) return {0, 0};
  if (is_nonneg(k)) {
    auto it = coeffs_.find(pack(k));
    return it == coeffs_.end() ? Complex(0, 0) : it->second;
  }
  auto it = coeffs_.find(pack(negate(k)));
  return it == coeffs_.end() ? Complex(0, 0) : std::conj(it->second);
}

void FourierSeries::set_key(Key key, Complex v) {
  if (key == zero_key()) v.imag(0);
  if (v == Complex(0, 0))
    coeffs_.erase(key);
  else
    coeffs_[key] = v;
}

void FourierSeries::set(const Mode& k, Complex v) {
  check_mode(k);
  for (int ki : k)
    if (std::abs(ki) > max_mode_) return;
  if (is_nonneg(k))
    set_key(pack(k), v);
  else
    set_key(pack(negate(k)), std::conj(v));
}

void FourierSeries::add_to(const Mode& k, Complex v) { set(k, coeff(k) + v); }

Real FourierSeries::sup_coeff() const {
  Real m = 0;
  for (const auto& kv : coeffs_) m = std::max(m, qabs(kv.second));
  return m;
}

Real FourierSeries::wiener_norm() const {
  Real s = 0;
  const Key z = zero_key();
  for (const auto& [key, c] : coeffs_) s += (key == z ? 1 : 2) * qabs(c);
  return s;
}

Real FourierSeries::eval(const std::vector<Real>& theta) const {
  if (static_cast<int>(theta.size()) != dim_)
    throw DimensionMismatch("fourier: evaluation point has wrong length");
  if (coeffs_.empty()) return 0;
  // per-axis powers of e^{2 pi i theta_a}
  std::vector<std::vector<Complex>> pw(dim_);
  for (int a = 0; a < dim_; ++a) {
    pw[a].resize(2 * max_mode_ + 1);
    Complex z = cis2pi(theta[a]);
    pw[a][max_mode_] = 1;
    for (int j = 1; j <= max_mode_; ++j) {
      pw[a][max_mode_ + j] = pw[a][max_mode_ + j - 1] * z;
      pw[a][max_mode_ - j] = std::conj(pw[a][max_mode_ + j]);
    }
  }
  const Key z0 = zero_key();
  Real sum = 0;
  for (const auto& [key, c] : coeffs_) {
    if (key == z0) {
      sum += c.real();
      continue;
    }
    Mode k = unpack(key);
    Complex e(1, 0);
    for (int a = 0; a < dim_; ++a) e *= pw[a][max_mode_ + k[a]];
    sum += 2 * (c * e).real();
  }
  return sum;
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& o) {
  require_same_dim(*this, o);
  max_mode_ = std::max(max_mode_, o.max_mode_);
  for (const auto& [key, c] : o.coeffs_) {
    auto it = coeffs_.find(key);
    if (it == coeffs_.end())
      coeffs_.emplace(key, c);
    else
      set_key(key, it->second + c);
  }
  return *this;
}

FourierSeries& FourierSeries::operator-=(const FourierSeries& o) {
  require_same_dim(*this, o);
  max_mode_ = std::max(max_mode_, o.max_mode_);
  for (const auto& [key, c] : o.coeffs_) {
    auto it = coeffs_.find(key);
    if (it == coeffs_.end())
      coeffs_.emplace(key, -c);
    else
      set_key(key, it->second - c);
  }
  return *this;
}

FourierSeries& FourierSeries::operator*=(Real s) {
  if (s == 0) {
    coeffs_.clear();
    return *this;
  }
  for (auto& kv : coeffs_) kv.second *= s;
  return *this;
}

FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
FourierSeries operator-(FourierSeries a) { return a *= Real(-1); }
FourierSeries operator*(FourierSeries a, Real s) { return a *= s; }
FourierSeries operator*(Real s, FourierSeries a) { return a *= s; }
FourierSeries operator*(const FourierSeries& a, const FourierSeries& b) { return mul(a, b); }

Real average(const FourierSeries& f) { return f.coeff(Mode(f.dim(), 0)).real(); }

FourierSeries oscillatory(const FourierSeries& f) {
  FourierSeries r = f;
  r.set(Mode(f.dim(), 0), 0);
  return r;
}

FourierSeries mul(const FourierSeries& f, const FourierSeries& g) {
  require_same_dim(f, g);
  const int M = std::max(f.max_mode(), g.max_mode());
  FourierSeries r(f.dim(), M);
  if (f.is_zero() || g.is_zero()) return r;
  const int dim = f.dim();
  const FourierSeries::Key z0 = r.zero_key();

  // expand g to both halves
  struct Entry {
    FourierSeries::Key key;
    Complex c;
  };
  std::vector<Entry> gf;
  gf.reserve(2 * g.size());
  for (const auto& [key, c] : g.half()) {
    gf.push_back({key, c});
    if (key != z0) gf.push_back({2 * z0 - key, std::conj(c)});
  }
  std::vector<Entry> ff;
  ff.reserve(2 * f.size());
  for (const auto& [key, c] : f.half()) {
    ff.push_back({key, c});
    if (key != z0) ff.push_back({2 * z0 - key, std::conj(c)});
  }

  const FourierSeries::Key mask = (FourierSeries::Key(1) << kBits) - 1;
  std::map<FourierSeries::Key, Complex> acc;
  for (const auto& a : ff) {
    for (const auto& b : gf) {
      FourierSeries::Key key = a.key + b.key - z0;
      if (key < z0) continue;
      bool inside = true;
      FourierSeries::Key kk = key;
      for (int i = 0; i < dim; ++i) {
        std::int64_t ki = static_cast<std::int64_t>(kk & mask) - kOffset;
        if (ki > M || ki < -M) {
          inside = false;
          break;
        }
        kk >>= kBits;
      }
      if (!inside) continue;
      acc[key] += a.c * b.c;
    }
  }
  for (const auto& [key, c] : acc) r.set_key(key, c);
  return r;
}

FourierSeries shift(const FourierSeries& f, const std::vector<Real>& delta) {
  if (static_cast<int>(delta.size()) != f.dim())
    throw DimensionMismatch("fourier: shift vector has wrong length");
  FourierSeries r(f.dim(), f.max_mode());
  for (const auto& [key, c] : f.half()) {
    Mode k = f.unpack(key);
    Real phase = 0;
    for (int a = 0; a < f.dim(); ++a) phase += k[a] * delta[a];
    r.set_key(key, c * cis2pi(phase));
  }
  return r;
}

FourierSeries diff_theta(const FourierSeries& f, int axis) {
  if (axis < 0 || axis >= f.dim()) throw DimensionMismatch("fourier: derivative axis out of range");
  FourierSeries r(f.dim(), f.max_mode());
  for (const auto& [key, c] : f.half()) {
    Mode k = f.unpack(key);
    if (k[axis] == 0) continue;
    r.set_key(key, c * Complex(0, 2 * qpi() * k[axis]));
  }
  return r;
}

FourierSeries truncate_modes(const FourierSeries& f, int max_mode) {
  FourierSeries r(f.dim(), max_mode);
  for (const auto& [key, c] : f.half()) {
    Mode k = f.unpack(key);
    bool inside = std::all_of(k.begin(), k.end(), [&](int v) { return std::abs(v) <= max_mode; });
    if (inside) r.set(k, c);
  }
  return r;
}

FourierSeries embed(const FourierSeries& f, int new_dim) {
  if (new_dim < f.dim()) throw DimensionMismatch("fourier: cannot embed into a smaller torus");
  FourierSeries r(new_dim, f.max_mode());
  for (const auto& [key, c] : f.half()) {
    Mode k = f.unpack(key);
    k.resize(new_dim, 0);
    r.set(k, c);
  }
  return r;
}

FourierSeries reflect(const FourierSeries& f) {
  FourierSeries r(f.dim(), f.max_mode());
  for (const auto& [key, c] : f.half()) r.set_key(key, std::conj(c));
  return r;
}

FourierSeries reciprocal(const FourierSeries& f, Real tol) {
  const Real m = average(f);
  const FourierSeries osc = oscillatory(f);
  const Real w = osc.wiener_norm();
  if (m == 0 || w >= qabs(m))
    throw HypothesisError("CNotInvertible",
                          "coefficient function may vanish: |mean| does not dominate the oscillation");
  // 1/f = (1/m) sum_j (-osc/m)^j
  const FourierSeries q = osc * (-1 / m);
  const Real ratio = w / qabs(m);
  FourierSeries term = FourierSeries::constant(f.dim(), f.max_mode(), 1 / m);
  FourierSeries sum = term;
  Real bound = 1 / qabs(m);
  for (int j = 1; j < 10000; ++j) {
    term = mul(term, q);
    sum += term;
    bound *= ratio;
    if (bound < tol || term.is_zero()) break;
  }
  return sum;
}

Complex sd_divisor(const Mode& k, const std::vector<Real>& freq, Setting setting) {
  Real dot = 0;
  for (std::size_t a = 0; a < k.size(); ++a) dot += k[a] * freq[a];
  if (setting == Setting::map) return cis2pi_m1(dot);
  return Complex(0, 2 * qpi() * dot);
}

namespace {

FourierSeries solve_sd(const FourierSeries& h, const Frequency& freq, Setting setting) {
  const std::vector<Real> w = setting == Setting::map ? freq.omega : freq.all();
  if (static_cast<int>(w.size()) != h.dim())
    throw DimensionMismatch("sd: frequency length " + std::to_string(w.size()) +
                            " does not match torus dimension " + std::to_string(h.dim()));
  const Real mean = average(h);
  if (qabs(mean) > Real(1e-13) * std::max(h.sup_coeff(), Real(1e-300)))
    throw NonZeroAverage("sd: right-hand side has average " + to_string(mean));
  FourierSeries phi(h.dim(), h.max_mode());
  const FourierSeries::Key z0 = h.zero_key();
  for (const auto& [key, c] : h.half()) {
    if (key == z0) continue;
    Mode k = h.unpack(key);
    Complex div = sd_divisor(k, w, setting);
    Real mag = qabs(div);
    if (mag < freq.diophantine_floor)
      throw SmallDivisorUnderflow(k, to_double(mag),
                                  "sd: divisor for mode " + mode_string(k) + " has magnitude " +
                                      std::to_string(to_double(mag)) + " below the floor");
    phi.set_key(key, c / div);
  }
  return phi;
}

}  // namespace

FourierSeries solve_sd_map(const FourierSeries& h, const Frequency& freq) {
  return solve_sd(h, freq, Setting::map);
}

FourierSeries solve_sd_flow(const FourierSeries& h, const Frequency& freq) {
  return solve_sd(h, freq, Setting::flow);
}

MarginReport diophantine_margin(const Frequency& freq, int k_max, Setting setting) {
  const std::vector<Real> w = setting == Setting::map ? freq.omega : freq.all();
  const int dim = static_cast<int>(w.size());
  MarginReport rep;
  rep.margin = -1;
  if (dim == 0 || k_max <= 0) return rep;
  Mode k(dim, -k_max);
  while (true) {
    bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    if (!zero && is_nonneg(k)) {
      Real mag = qabs(sd_divisor(k, w, setting));
      if (rep.margin < 0 || mag < rep.margin) {
        rep.margin = mag;
        rep.argmin = k;
      }
    }
    int a = dim - 1;
    while (a >= 0 && k[a] == k_max) {
      k[a] = -k_max;
      --a;
    }
    if (a < 0) break;
    ++k[a];
  }
  return rep;
}

}  // namespace ptori
