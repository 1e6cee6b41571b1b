#include "ptori/operators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "ptori/errors.hpp"
#include "ptori/map_solver.hpp"

namespace ptori {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string fmt(ComplexD z) { return "(" + fmt(z.real()) + "," + fmt(z.imag()) + ")"; }

}  // namespace

void validate_sector(const Sector& s) {
  if (s.k < 2) throw ConfigError("sector: k must be at least 2");
  if (!(s.beta > 0) || !(s.beta < kPi / (s.k - 1)))
    throw ConfigError("sector: beta must lie in (0, pi/(k-1)), got " + fmt(s.beta));
  if (!(s.rho > 0) || !(s.rho < 1)) throw ConfigError("sector: rho must lie in (0, 1), got " + fmt(s.rho));
}

bool in_sector(const Sector& s, ComplexD u, double slack) {
  const double r = std::abs(u);
  if (!(r > 0)) return false;
  return r <= s.rho * (1 + slack) && std::abs(std::arg(u)) <= s.beta / 2 * (1 + slack);
}

double mu_limit(const Sector& s, double lead) {
  return (s.k - 1) * std::abs(lead) * std::cos((s.k - 1) * s.beta / 2);
}

MuBound make_mu_bound(double mu, const Sector& s, double lead) {
  validate_sector(s);
  const double lim = mu_limit(s, lead);
  if (!(mu > 0) || !(mu < lim))
    throw ConfigError("mu must lie in (0, " + fmt(lim) + ") for this sector and leading coefficient, got " + fmt(mu));
  return {mu, (s.k - 1) * s.beta / 2};
}

std::vector<ComplexD> sector_samples(const Sector& s, int nr, int na) {
  std::vector<ComplexD> out;
  out.reserve(static_cast<std::size_t>(nr) * na);
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < na; ++j) {
      const double r = s.rho * (i + 0.5) / nr;
      const double a = -s.beta / 2 + s.beta * (j + 0.5) / na;
      out.push_back(std::polar(r, a));
    }
  return out;
}

double iterate_bound(double abs_u, long j, double mu, int k) {
  return abs_u / std::pow(1 + double(j) * mu * std::pow(abs_u, k - 1), 1.0 / (k - 1));
}

SectorReport sector_iterate_check(const UPoly& R, const Sector& s, const MuBound& mu, long J,
                                  const std::vector<ComplexD>& samples, bool throw_on_violation) {
  validate_sector(s);
  if (!(R.coeff(s.k) < 0) || R.coeff(1) != 1 || R.leading_index() != s.k)
    throw HypothesisError("HypothesisViolated", "sector check needs R = u + R_k u^k + ... with R_k < 0");
  SectorReport rep;
  rep.iterations = J;
  rep.samples = samples.size();
  rep.min_slack = std::numeric_limits<double>::infinity();
  // roundoff allowance for the j = 0 equality and for points on the boundary
  constexpr double eps = 1e-12;
  auto violate = [&](ComplexD u0, long j, const std::string& kind) {
    if (!rep.ok) return;
    rep.ok = false;
    rep.witness_u = u0;
    rep.witness_j = j;
    rep.witness_kind = kind;
  };
  for (const ComplexD u0 : samples) {
    const double a0 = std::abs(u0);
    ComplexD z = u0;
    for (long j = 0; j <= J; ++j) {
      if (!in_sector(s, z, eps)) violate(u0, j, "left_sector");
      const double b = iterate_bound(a0, j, mu.mu, s.k);
      const double slack = (b - std::abs(z)) / b;
      rep.min_slack = std::min(rep.min_slack, slack);
      if (slack < -eps) violate(u0, j, "bound");
      if (!rep.ok && throw_on_violation) break;
      z = R.eval_double(z);
    }
    if (!rep.ok && throw_on_violation) break;
  }
  if (!rep.ok && throw_on_violation)
    throw DiagnosticError("BoundViolated", "sector bound fails (" + rep.witness_kind + ") at u=" + fmt(rep.witness_u) +
                                               ", j=" + std::to_string(rep.witness_j));
  return rep;
}

namespace {

double tail_exponent(const TailControl& c) {
  const double q = double(c.order) / (c.k - 1);
  if (!(q > 1)) throw ConfigError("tail control: order must exceed k-1");
  if (!(c.mu > 0)) throw ConfigError("tail control: mu must be positive");
  return q;
}

// smallest x >= 0 with eta |u|^m (1 + x a)^{1-q} / (a (q-1)) <= tol/2
double horizon(double abs_u, const TailControl& c) {
  const double q = tail_exponent(c);
  if (c.eta_norm == 0 || abs_u == 0) return 0;
  const double a = c.mu * std::pow(abs_u, c.k - 1);
  const double lead = c.eta_norm * std::pow(abs_u, c.order) / (a * (q - 1));
  const double r = (c.tol / 2) / lead;
  if (r >= 1) return 0;
  return (std::pow(r, 1 / (1 - q)) - 1) / a;
}

}  // namespace

double orbit_tail_bound(double abs_u, long J, const TailControl& c) {
  const double q = tail_exponent(c);
  const double a = c.mu * std::pow(abs_u, c.k - 1);
  const double scale = c.eta_norm * std::pow(abs_u, c.order);
  const double integral = [&](double x) { return scale * std::pow(1 + x * a, 1 - q) / (a * (q - 1)); }(
      std::max<double>(0, double(J) - 1));
  return J == 0 ? scale + integral : integral;
}

long orbit_terms_needed(double abs_u, const TailControl& c) {
  const double x = horizon(abs_u, c);
  if (c.eta_norm == 0) return 0;
  const double J = std::ceil(x) + 1;
  if (!(J <= double(c.j_max)))
    throw DiagnosticError("TailNotConverged", "orbit sum at |u|=" + fmt(abs_u) + " needs " + fmt(J) +
                                                  " terms, above j_max=" + std::to_string(c.j_max));
  return static_cast<long>(J);
}

double flow_tail_bound(double abs_u, double T, const TailControl& c) {
  const double q = tail_exponent(c);
  const double a = c.mu * std::pow(abs_u, c.k - 1);
  return c.eta_norm * std::pow(abs_u, c.order) * std::pow(1 + T * a, 1 - q) / (a * (q - 1));
}

double flow_time_needed(double abs_u, const TailControl& c) {
  const double T = horizon(abs_u, c);
  if (!(T <= c.t_max))
    throw DiagnosticError("TailNotConverged", "flow integral at |u|=" + fmt(abs_u) + " needs T=" + fmt(T) +
                                                  ", above t_max=" + fmt(c.t_max));
  return T;
}

InverseValue orbit_sum_inverse(const ComplexDefect& eta, const UPoly& R, const std::vector<double>& omega, ComplexD u,
                               const std::vector<double>& theta, const TailControl& c) {
  InverseValue out;
  const long J = orbit_terms_needed(std::abs(u), c);
  ComplexD z = u, sum{0, 0};
  std::vector<double> th = theta;
  for (long j = 0; j < J; ++j) {
    sum += eta(z, th);
    z = R.eval_double(z);
    for (std::size_t a = 0; a < omega.size() && a < th.size(); ++a) th[a] += omega[a];
  }
  out.value = -sum;
  out.terms = J;
  out.horizon = double(J);
  out.tail_bound = c.eta_norm == 0 ? 0 : orbit_tail_bound(std::abs(u), J, c);
  return out;
}

ComplexD apply_shift_operator(const ComplexDefect& f, const UPoly& R, const std::vector<double>& omega, ComplexD u,
                              const std::vector<double>& theta) {
  std::vector<double> th = theta;
  for (std::size_t a = 0; a < omega.size() && a < th.size(); ++a) th[a] += omega[a];
  return f(R.eval_double(u), th) - f(u, theta);
}

InverseValue flow_inverse(const ComplexDefect& eta, const FlowDrift& J, ComplexD u, const std::vector<double>& theta,
                          const TailControl& c, const Sector* sector) {
  namespace ode = boost::numeric::odeint;
  InverseValue out;
  if (c.eta_norm == 0) return out;
  const double au = std::abs(u);
  const double T = flow_time_needed(au, c);
  // natural time tau = a s; u scaled by |u0|, the integral by eta_norm |u0|^m / a
  const double a = c.mu * std::pow(au, c.k - 1);
  const double iscale = c.eta_norm * std::pow(au, c.order) / a;
  using State = std::array<double, 4>;
  auto angles = [&](double tau) {
    std::vector<double> th = theta;
    for (std::size_t i = 0; i < J.rates.size() && i < th.size(); ++i) th[i] += J.rates[i] * tau / a;
    return th;
  };
  auto rhs = [&](const State& x, State& dx, double tau) {
    const ComplexD z(x[0] * au, x[1] * au);
    const ComplexD v = J.Y.eval_double(z) / (a * au);
    const ComplexD e = eta(z, angles(tau)) / (c.eta_norm * std::pow(au, c.order));
    dx[0] = v.real();
    dx[1] = v.imag();
    dx[2] = e.real();
    dx[3] = e.imag();
  };
  auto observer = [&](const State& x, double tau) {
    if (!sector) return;
    const ComplexD z(x[0] * au, x[1] * au);
    if (!in_sector(*sector, z, 1e-9))
      throw DiagnosticError("FlowLeftSector", "flow from u=" + fmt(u) + " leaves the sector at s=" + fmt(tau / a) +
                                                  ", phi_s=" + fmt(z));
  };
  State x{u.real() / au, u.imag() / au, 0, 0};
  const double tau_end = T * a;
  std::size_t steps = 0;
  if (tau_end > 0) {
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(c.quad_rel, c.quad_rel);
    steps = ode::integrate_adaptive(stepper, rhs, x, 0.0, tau_end, std::min(0.01, tau_end), observer);
  }
  out.value = -ComplexD(x[2], x[3]) * iscale;
  out.terms = static_cast<long>(steps);
  out.horizon = T;
  out.tail_bound = flow_tail_bound(au, T, c);
  return out;
}

ComplexD directional_derivative(const ComplexDefect& f, const FlowDrift& J, ComplexD u,
                                const std::vector<double>& theta, double h) {
  const ComplexD v = J.Y.eval_double(u);
  std::vector<double> tp = theta, tm = theta;
  for (std::size_t i = 0; i < J.rates.size() && i < theta.size(); ++i) {
    tp[i] += h * J.rates[i];
    tm[i] -= h * J.rates[i];
  }
  return (f(u + h * v, tp) - f(u - h * v, tm)) / (2 * h);
}

double inverse_norm_bound(Setting s, const Sector& sec, double mu, int n) {
  const double b = double(sec.k - 1) / (mu * n);
  return s == Setting::map ? std::pow(sec.rho, sec.k - 1) + b : b;
}

// ---------------------------------------------------------------------------
// contraction probe

namespace {

// e^{2 pi i m phi_a} for |m| <= M on each axis
class Trig {
 public:
  void build(const double* phi, int dim, int M) {
    dim_ = dim;
    M_ = M;
    e_.resize(static_cast<std::size_t>(dim) * (2 * M + 1));
    for (int a = 0; a < dim; ++a) {
      const ComplexD w = std::polar(1.0, 2 * kPi * phi[a]);
      ComplexD* row = &e_[static_cast<std::size_t>(a) * (2 * M + 1) + M];
      row[0] = 1;
      for (int m = 1; m <= M; ++m) {
        row[m] = row[m - 1] * w;
        row[-m] = std::conj(row[m]);
      }
    }
  }
  ComplexD at(const int* k) const {
    ComplexD r = 1;
    for (int a = 0; a < dim_; ++a) r *= e_[static_cast<std::size_t>(a) * (2 * M_ + 1) + M_ + k[a]];
    return r;
  }

 private:
  int dim_ = 0;
  int M_ = 0;
  std::vector<ComplexD> e_;
};

struct DSeries {
  int dim = 0;
  double c0 = 0;
  std::vector<int> modes;  // dim entries per stored mode, nonzero half
  std::vector<ComplexD> c;

  DSeries() = default;
  explicit DSeries(const FourierSeries& f) : dim(f.dim()) {
    f.for_each_half([&](const Mode& k, Complex v) {
      if (std::all_of(k.begin(), k.end(), [](int x) { return x == 0; })) {
        c0 = to_double(v.real());
        return;
      }
      const ComplexD cd = to_double(v);
      if (cd == ComplexD(0, 0)) return;
      modes.insert(modes.end(), k.begin(), k.end());
      c.push_back(cd);
    });
  }
  double value(const Trig& t) const {
    ComplexD s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) s += c[i] * t.at(&modes[i * dim]);
    return c0 + 2 * s.real();
  }
  // f(phi + delta) - f(phi)
  double diff(const Trig& t, const double* delta) const {
    ComplexD s = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      double kd = 0;
      for (int a = 0; a < dim; ++a) kd += modes[i * dim + a] * delta[a];
      const double h = kPi * kd, sh = std::sin(h);
      s += c[i] * t.at(&modes[i * dim]) * ComplexD(-2 * sh * sh, std::sin(2 * h));
    }
    return 2 * s.real();
  }
  int max_mode() const {
    int m = 0;
    for (int x : modes) m = std::max(m, std::abs(x));
    return m;
  }
};

struct DJet {
  int lo = 0;
  std::vector<DSeries> c;

  DJet() = default;
  explicit DJet(const TFJet& j) {
    lo = std::min(j.min_order(), j.max_order() + 1);
    for (int i = lo; i <= j.max_order(); ++i) c.emplace_back(j.coeff(i));
  }
  double eval(double u, const Trig& t) const {
    double s = 0;
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) s = s * u + c[i].value(t);
    return s * std::pow(u, lo);
  }
  int max_mode() const {
    int m = 0;
    for (const auto& s : c) m = std::max(m, s.max_mode());
    return m;
  }
};

struct DPoly {
  struct Term {
    int l, m;
    DSeries s;
  };
  std::vector<Term> terms;

  DPoly() = default;
  explicit DPoly(const TFPoly& p) {
    for (const auto& [e, s] : p.terms()) terms.push_back({e.first, e.second, DSeries(s)});
  }
  int max_mode() const {
    int m = 0;
    for (const auto& t : terms) m = std::max(m, t.s.max_mode());
    return m;
  }
  // P(X + dx, Y + dy, phi + dphi) - P(X, Y, phi)
  double diff(double X, double Y, double dx, double dy, const Trig& t, const double* dphi) const {
    double out = 0;
    for (const auto& tm : terms) {
      const double a = std::pow(X + dx, tm.l), b = std::pow(Y + dy, tm.m);
      out += tm.s.diff(t, dphi) * a * b;
      out += tm.s.value(t) * (pow_diff(X, dx, tm.l) * b + std::pow(X, tm.l) * pow_diff(Y, dy, tm.m));
    }
    return out;
  }
  // (A + d)^e - A^e without cancellation
  static double pow_diff(double A, double d, int e) {
    double s = 0, binom = 1;
    for (int i = 1; i <= e; ++i) {
      binom = binom * (e - i + 1) / i;
      s += binom * std::pow(A, e - i) * std::pow(d, i);
    }
    return s;
  }
};

double cheb_node(int i, int n) { return std::cos(kPi * (i + 0.5) / n); }

// Real function on [u_min, rho] x T^dim from values on Chebyshev x uniform nodes.
class GridInterpolant {
 public:
  GridInterpolant(int nu, int nt, int dim, double u_min, double rho)
      : nu_(nu), nt_(nt), dim_(dim), lo_(u_min), hi_(rho) {
    na_ = 1;
    for (int a = 0; a < dim; ++a) na_ *= nt;
    half_ = (nt - 1) / 2;
    // angle modes in [-half, half]^dim, flattened like the nodes
    modes_.resize(static_cast<std::size_t>(na_) * dim);
    for (int j = 0; j < na_; ++j) {
      int r = j;
      for (int a = 0; a < dim; ++a) {
        modes_[static_cast<std::size_t>(j) * dim + a] = r % nt - half_;
        r /= nt;
      }
    }
  }
  int u_count() const { return nu_; }
  int angle_count() const { return na_; }
  double u_node(int i) const { return (hi_ + lo_) / 2 + (hi_ - lo_) / 2 * cheb_node(i, nu_); }
  std::vector<double> angle_node(int j) const {
    std::vector<double> th(dim_);
    for (int a = 0; a < dim_; ++a) {
      th[a] = double(j % nt_) / nt_;
      j /= nt_;
    }
    return th;
  }
  int half() const { return half_; }

  // values[i * na + j] -> coefficients
  void fit(const std::vector<double>& values) {
    coef_.assign(static_cast<std::size_t>(nu_) * na_, ComplexD(0, 0));
    // Chebyshev transform in u
    std::vector<double> cu(static_cast<std::size_t>(nu_) * na_, 0.0);
    for (int l = 0; l < nu_; ++l)
      for (int i = 0; i < nu_; ++i) {
        const double tl = std::cos(l * kPi * (i + 0.5) / nu_) * (l == 0 ? 1.0 : 2.0) / nu_;
        for (int j = 0; j < na_; ++j) cu[l * na_ + j] += tl * values[i * na_ + j];
      }
    // DFT in the angles
    std::vector<std::vector<double>> nodes(na_);
    for (int j = 0; j < na_; ++j) nodes[j] = angle_node(j);
    for (int m = 0; m < na_; ++m) {
      const int* km = &modes_[static_cast<std::size_t>(m) * dim_];
      for (int j = 0; j < na_; ++j) {
        double ph = 0;
        for (int a = 0; a < dim_; ++a) ph += km[a] * nodes[j][a];
        const ComplexD e = std::polar(1.0 / na_, -2 * kPi * ph);
        for (int l = 0; l < nu_; ++l) coef_[l * na_ + m] += cu[l * na_ + j] * e;
      }
    }
  }

  // Chebyshev values at u; below u_min the series is extrapolated
  void cheb(double u, std::vector<double>& T) const {
    const double x = std::min((2 * u - (hi_ + lo_)) / (hi_ - lo_), 1.0);
    T.resize(nu_);
    T[0] = 1;
    if (nu_ > 1) T[1] = x;
    for (int l = 2; l < nu_; ++l) T[l] = 2 * x * T[l - 1] - T[l - 2];
  }
  double eval(const std::vector<double>& T, const Trig& t) const {
    ComplexD s = 0;
    for (int m = 0; m < na_; ++m) {
      ComplexD cm = 0;
      for (int l = 0; l < nu_; ++l) cm += coef_[l * na_ + m] * T[l];
      s += cm * t.at(&modes_[static_cast<std::size_t>(m) * dim_]);
    }
    return s.real();
  }

 private:
  int nu_, nt_, dim_;
  double lo_, hi_;
  int na_ = 1;
  int half_ = 0;
  std::vector<int> modes_;
  std::vector<ComplexD> coef_;
};

struct OrbitPoint {
  double u;
  std::vector<double> theta;
  double Kx, Ky;
  std::vector<double> Kt;
  double Gx, Gy;
  std::vector<double> Gt;
};

class Probe {
 public:
  Probe(const ReducedMap& F, const ManifoldPair& pair, const ContractionOptions& opt)
      : pair_(pair), opt_(opt) {
    n_ = pair.n;
    k_ = pair.k;
    p_ = pair.p;
    d_ = static_cast<int>(pair.Ktheta.size());
    dim_ = F.data.torus_dim();
    const double Rk = to_double(pair.R.coeff(k_));
    mu_ = opt.mu_fraction * (k_ - 1) * std::abs(Rk);
    u_min_ = opt.rho * opt.u_min_fraction;
    for (double w : pair.freq.omega) omega_.push_back(to_double(w));
    for (Real c : pair.R.coeffs()) R_.push_back(to_double(c));

    const int N = truncation_order(n_, k_, p_) + opt.extra_order;
    const SubstitutedComponents G = map_residual_jets(pair, F.data, N);
    Gx_ = DJet(G.x);
    Gy_ = DJet(G.y);
    for (const auto& t : G.theta) Gt_.emplace_back(t);
    Kx_ = DJet(pair.Kx);
    Ky_ = DJet(pair.Ky);
    for (const auto& t : pair.Ktheta) Kt_.emplace_back(t);
    Fx_ = DPoly(F.data.x);
    Fy_ = DPoly(F.data.y);
    for (const auto& t : F.data.theta) Ft_.emplace_back(t);

    jet_modes_ = std::max({Gx_.max_mode(), Gy_.max_mode(), Kx_.max_mode(), Ky_.max_mode()});
    for (const auto& j : Gt_) jet_modes_ = std::max(jet_modes_, j.max_mode());
    for (const auto& j : Kt_) jet_modes_ = std::max(jet_modes_, j.max_mode());
    f_modes_ = std::max(Fx_.max_mode(), Fy_.max_mode());
    for (const auto& f : Ft_) f_modes_ = std::max(f_modes_, f.max_mode());

    weights_ = {n_, n_ + k_ - 1};
    for (int i = 0; i < d_; ++i) weights_.push_back(n_ + 2 * p_ - k_ - 1);

    int nt = opt.theta_nodes;
    if (nt <= 0) nt = dim_ <= 1 ? 15 : dim_ == 2 ? 7 : 5;
    if (nt % 2 == 0) ++nt;
    for (std::size_t c = 0; c < weights_.size(); ++c) interp_.emplace_back(opt.u_nodes, nt, dim_, u_min_, opt.rho);
    build_orbits();
  }

  double R(double u) const {
    double s = 0;
    for (int i = static_cast<int>(R_.size()) - 1; i >= 0; --i) s = s * u + R_[i];
    return s;
  }

  int components() const { return static_cast<int>(weights_.size()); }
  int grid_points() const { return interp_[0].u_count() * interp_[0].angle_count(); }
  long orbit_terms() const { return total_terms_; }
  double mu() const { return mu_; }
  double u_min() const { return u_min_; }

  // values h_c on the grid, flattened [c][i * na + j]
  using Field = std::vector<std::vector<double>>;

  Field zero() const { return Field(components(), std::vector<double>(grid_points(), 0.0)); }

  void load(const Field& h) {
    for (int c = 0; c < components(); ++c) interp_[c].fit(h[c]);
  }

  // T(Delta) for the loaded Delta
  Field apply() const {
    Field out = zero();
    std::vector<double> N(components());
    Scratch s;
    for (std::size_t g = 0; g < starts_.size(); ++g) {
      std::vector<double> acc(components(), 0.0);
      for (std::size_t q = starts_[g]; q < ends_[g]; ++q) {
        nonlinear(orbit_[q], N, s);
        for (int c = 0; c < components(); ++c) acc[c] += N[c];
      }
      const double u0 = orbit_[starts_[g]].u;
      for (int c = 0; c < components(); ++c) out[c][g] = -acc[c] / std::pow(u0, weights_[c]);
    }
    return out;
  }

  // max over grid nodes with R(u) >= u_min of the weighted defect of S Delta = N(Delta)
  double residual() const {
    std::vector<double> N(components()), now(components()), next(components());
    Scratch s;
    double worst = 0;
    for (std::size_t g = 0; g < starts_.size(); ++g) {
      const OrbitPoint& z0 = orbit_[starts_[g]];
      if (R(z0.u) < u_min_) continue;
      nonlinear(z0, N, s);
      delta_at(z0.u, z0.theta, now, s);
      std::vector<double> th = z0.theta;
      for (int a = 0; a < d_; ++a) th[a] += omega_[a];
      delta_at(R(z0.u), th, next, s);
      for (int c = 0; c < components(); ++c) {
        const double r = std::abs(next[c] - now[c] - N[c]) / std::pow(z0.u, weights_[c] + k_ - 1);
        worst = std::max(worst, r);
      }
    }
    return worst;
  }

 private:
  struct Scratch {
    Trig angles, full;
    std::vector<double> T, phi, dphi;
  };

  void build_orbits() {
    const int na = interp_[0].angle_count();
    TailControl tc;
    tc.k = k_;
    tc.order = *std::min_element(weights_.begin(), weights_.end()) + k_ - 1;
    tc.eta_norm = 1;
    tc.mu = mu_;
    tc.j_max = 5000000;
    Trig t;
    for (int i = 0; i < interp_[0].u_count(); ++i) {
      const double u0 = interp_[0].u_node(i);
      tc.tol = opt_.tail_rel_tol * std::pow(u0, tc.order);
      const long J = orbit_terms_needed(u0, tc);
      for (int j = 0; j < na; ++j) {
        starts_.push_back(orbit_.size());
        double u = u0;
        std::vector<double> th = interp_[0].angle_node(j);
        for (long s = 0; s < J; ++s) {
          OrbitPoint z;
          z.u = u;
          z.theta = th;
          t.build(th.data(), dim_, jet_modes_);
          z.Kx = Kx_.eval(u, t);
          z.Ky = Ky_.eval(u, t);
          z.Gx = Gx_.eval(u, t);
          z.Gy = Gy_.eval(u, t);
          for (int a = 0; a < d_; ++a) {
            z.Kt.push_back(Kt_[a].eval(u, t));
            z.Gt.push_back(Gt_[a].eval(u, t));
          }
          orbit_.push_back(std::move(z));
          u = R(u);
          for (int a = 0; a < d_; ++a) th[a] += omega_[a];
        }
        ends_.push_back(orbit_.size());
        total_terms_ += J;
      }
    }
  }

  void delta_at(double u, const std::vector<double>& theta, std::vector<double>& out, Scratch& s) const {
    interp_[0].cheb(u, s.T);
    s.angles.build(theta.data(), dim_, interp_[0].half());
    for (int c = 0; c < components(); ++c) out[c] = std::pow(u, weights_[c]) * interp_[c].eval(s.T, s.angles);
  }

  void nonlinear(const OrbitPoint& z, std::vector<double>& N, Scratch& s) const {
    std::vector<double> f(components());
    delta_at(z.u, z.theta, f, s);
    s.phi.assign(z.theta.begin(), z.theta.end());
    s.dphi.assign(dim_, 0.0);
    for (int a = 0; a < d_; ++a) {
      s.phi[a] += z.Kt[a];
      s.dphi[a] = f[2 + a];
    }
    s.full.build(s.phi.data(), dim_, f_modes_);
    N[0] = Fx_.diff(z.Kx, z.Ky, f[0], f[1], s.full, s.dphi.data()) - f[0] + z.Gx;
    N[1] = Fy_.diff(z.Kx, z.Ky, f[0], f[1], s.full, s.dphi.data()) - f[1] + z.Gy;
    for (int a = 0; a < d_; ++a)
      N[2 + a] = Ft_[a].diff(z.Kx, z.Ky, f[0], f[1], s.full, s.dphi.data()) + z.Gt[a];
  }

  const ManifoldPair& pair_;
  ContractionOptions opt_;
  int n_ = 0, k_ = 0, p_ = 0, d_ = 0, dim_ = 0;
  double mu_ = 0, u_min_ = 0;
  std::vector<double> omega_, R_;
  DJet Gx_, Gy_, Kx_, Ky_;
  std::vector<DJet> Gt_, Kt_;
  DPoly Fx_, Fy_;
  std::vector<DPoly> Ft_;
  int jet_modes_ = 0, f_modes_ = 0;
  std::vector<int> weights_;
  std::vector<GridInterpolant> interp_;
  std::vector<OrbitPoint> orbit_;
  std::vector<std::size_t> starts_, ends_;
  long total_terms_ = 0;
};

double field_norm(const Probe::Field& h) {
  double m = 0;
  for (const auto& c : h)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

double field_distance(const Probe::Field& a, const Probe::Field& b) {
  double m = 0;
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i) m = std::max(m, std::abs(a[c][i] - b[c][i]));
  return m;
}

}  // namespace

ContractionReport contraction_probe(const ReducedMap& F, const ManifoldPair& pair, const ContractionOptions& opt) {
  if (pair.setting != Setting::map || pair.helicoure)
    throw ConfigError("contraction probe: pair must come from the map solver");
  if (!(pair.R.coeff(pair.k) < 0)) throw ConfigError("contraction probe: needs the stable branch (R_k < 0)");
  if (!(opt.rho > 0 && opt.rho < 1)) throw ConfigError("contraction probe: rho must lie in (0, 1)");
  if (!(opt.ball_alpha > 0)) throw ConfigError("contraction probe: ball_alpha must be positive");
  if (opt.u_nodes < 2 || opt.iterations < 2 || !(opt.u_min_fraction > 0 && opt.u_min_fraction < 1))
    throw ConfigError("contraction probe: invalid grid options");

  Probe probe(F, pair, opt);
  ContractionReport rep;
  rep.n = pair.n;
  rep.k = pair.k;
  rep.p = pair.p;
  rep.rho = opt.rho;
  rep.u_min = probe.u_min();
  rep.mu = probe.mu();
  rep.ball_alpha = opt.ball_alpha;
  rep.grid_points = probe.grid_points();
  rep.orbit_terms = probe.orbit_terms();
  rep.note =
      "fixed-resolution diagnostic on the real slice; sup norms are sampled, not certified";

  Probe::Field h = probe.zero();
  probe.load(h);
  rep.delta_norms.push_back(0);
  rep.residuals.push_back(probe.residual());
  int streak = 0;
  for (int m = 0; m < opt.iterations; ++m) {
    Probe::Field next = probe.apply();
    rep.update_norms.push_back(field_distance(next, h));
    h = std::move(next);
    probe.load(h);
    rep.delta_norms.push_back(field_norm(h));
    rep.residuals.push_back(probe.residual());
    if (rep.delta_norms.back() > opt.ball_alpha) rep.in_ball = false;
    if (m > 0) {
      const double prev = rep.update_norms[m - 1];
      const double f = prev > 0 ? rep.update_norms[m] / prev : 0;
      rep.factors.push_back(f);
      rep.max_factor = std::max(rep.max_factor, f);
      if (!(f < 1)) rep.contracting = false;
      streak = f < 1 ? 0 : streak + 1;
      if (streak >= 5)
        throw DiagnosticError("Diverged", "contraction factor >= 1 over 5 iterations (last " + fmt(f) + ")");
    }
  }
  for (std::size_t i = 1; i < rep.residuals.size(); ++i)
    if (!(rep.residuals[i] < rep.residuals[i - 1])) rep.residual_monotone = false;
  return rep;
}

}  // namespace ptori
