#include "ptori/residual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ptori/errors.hpp"

namespace ptori {

std::string to_string(Branch b) { return b == Branch::stable ? "stable" : "unstable"; }

Branch parse_branch(const std::string& s) {
  if (s == "stable") return Branch::stable;
  if (s == "unstable") return Branch::unstable;
  throw ConfigError("branch must be 'stable' or 'unstable', got '" + s + "'");
}

std::array<int, 3> expected_orders(const ManifoldPair& pair) {
  const int n = pair.n, k = pair.k, p = pair.p;
  if (pair.helicoure) return {n + 2, n + 3, n + 2};
  return {n + k, n + 2 * k - 1, n + 2 * p - 1};
}

std::vector<Real> log_grid(double lo, double hi, int n) {
  std::vector<Real> u;
  if (n == 1) return {Real(lo)};
  const Real a = qlog(Real(lo)), b = qlog(Real(hi));
  for (int i = 0; i < n; ++i) u.push_back(qexp(a + (b - a) * Real(i) / Real(n - 1)));
  return u;
}

std::vector<std::vector<Real>> theta_grid(int dim, int per_axis) {
  std::vector<std::vector<Real>> out{{}};
  for (int a = 0; a < dim; ++a) {
    std::vector<std::vector<Real>> next;
    for (const auto& t : out)
      for (int j = 0; j < per_axis; ++j) {
        auto v = t;
        v.push_back(Real(j) / Real(per_axis));
        next.push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

double fit_slope(const std::vector<Real>& u, const std::vector<Real>& r, double lo, double hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < u.size() && i < r.size(); ++i) {
    const double ui = to_double(u[i]);
    if (ui < lo * (1 - 1e-9) || ui > hi * (1 + 1e-9) || !(r[i] > 0)) continue;
    const double x = to_double(qlog(u[i])), y = to_double(qlog(r[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

namespace {

std::vector<Real> neg(const std::vector<Real>& v) {
  std::vector<Real> r = v;
  for (auto& x : r) x = -x;
  return r;
}

TFJet time_derivative(const TFJet& K, const UPoly& Y, const std::vector<Real>& rates) {
  TFJet out = jet_mul_poly(jet_derivative_u(K), Y);
  for (std::size_t a = 0; a < rates.size(); ++a)
    if (rates[a] != 0) out += jet_derivative_theta(K, static_cast<int>(a)) * rates[a];
  return out;
}

struct Pointwise {
  Real x, y;
  std::vector<Real> tails;
  std::vector<Real> angles;
};

Pointwise embed_point(const ManifoldPair& pair, Real u, const std::vector<Real>& theta) {
  Pointwise z;
  z.x = pair.Kx.eval(u, theta);
  z.y = pair.Ky.eval(u, theta);
  z.angles = theta;
  for (std::size_t i = 0; i < pair.Ktheta.size(); ++i) {
    z.tails.push_back(pair.Ktheta[i].eval(u, theta));
    z.angles[i] += z.tails.back();
  }
  return z;
}

std::vector<Real> shifted(const std::vector<Real>& theta, const std::vector<Real>& by) {
  std::vector<Real> r = theta;
  for (std::size_t i = 0; i < by.size() && i < r.size(); ++i) r[i] += by[i];
  return r;
}

// derivative jets of K used by the pointwise field residual
struct FieldEvaluator {
  const ManifoldPair& pair;
  FieldRates X;
  TFJet dx, dy;
  std::vector<TFJet> dth;

  FieldEvaluator(const ManifoldPair& p, FieldRates field) : pair(p), X(std::move(field)) {
    const auto rates = p.freq.all();
    dx = time_derivative(p.Kx, p.R, rates);
    dy = time_derivative(p.Ky, p.R, rates);
    for (const auto& t : p.Ktheta) dth.push_back(time_derivative(t, p.R, rates));
  }

  std::array<Real, 3> at(Real u, const std::vector<Real>& theta) const {
    const Pointwise z = embed_point(pair, u, theta);
    const Point3 v = X(z.x, z.y, z.angles);
    std::array<Real, 3> r{};
    r[0] = qabs(v.x - dx.eval(u, theta));
    r[1] = qabs(v.y - dy.eval(u, theta));
    for (std::size_t i = 0; i < dth.size(); ++i) r[2] = std::max(r[2], qabs(v.theta[i] - dth[i].eval(u, theta)));
    return r;
  }
};

FieldRates rates_of(const TaylorFourierData& X) {
  return [&X](Real x, Real y, const std::vector<Real>& a) {
    Point3 v;
    v.x = X.x.eval(x, y, a);
    v.y = X.y.eval(x, y, a);
    for (const auto& t : X.theta) v.theta.push_back(t.eval(x, y, a));
    return v;
  };
}

template <class Fn>
ResidualReport build_report(const ManifoldPair& pair, const ResidualGrid& grid, Fn fn) {
  ResidualReport rep;
  rep.u = grid.u;
  rep.fit_lo = grid.fit_lo;
  rep.fit_hi = grid.fit_hi;
  rep.expected = expected_orders(pair);
  for (Real u : grid.u) {
    std::array<Real, 3> sup{};
    for (const auto& th : grid.theta) {
      auto r = fn(u, th);
      for (int c = 0; c < 3; ++c) sup[c] = std::max(sup[c], r[c]);
    }
    rep.res_x.push_back(sup[0]);
    rep.res_y.push_back(sup[1]);
    rep.res_theta.push_back(sup[2]);
  }
  rep.slope[0] = fit_slope(rep.u, rep.res_x, rep.fit_lo, rep.fit_hi);
  rep.slope[1] = fit_slope(rep.u, rep.res_y, rep.fit_lo, rep.fit_hi);
  rep.slope[2] = fit_slope(rep.u, rep.res_theta, rep.fit_lo, rep.fit_hi);
  return rep;
}

}  // namespace

SubstitutedComponents map_residual_jets(const ManifoldPair& pair, const TaylorFourierData& F, int N) {
  std::vector<TFJet> th;
  for (const auto& t : pair.Ktheta) th.push_back(t.with_max_order(N));
  const TFJet Kx = pair.Kx.with_max_order(N), Ky = pair.Ky.with_max_order(N);
  SubstitutedComponents G = substitute_map(F, Kx, Ky, th, N);
  const auto& w = pair.freq.omega;
  G.x -= compose_inner(Kx, pair.R, w);
  G.y -= compose_inner(Ky, pair.R, w);
  for (std::size_t i = 0; i < th.size(); ++i) {
    G.theta[i] += th[i];
    G.theta[i] -= compose_inner(th[i], pair.R, w);
  }
  return G;
}

SubstitutedComponents field_residual_jets(const ManifoldPair& pair, const TaylorFourierData& X, int N) {
  std::vector<TFJet> th;
  for (const auto& t : pair.Ktheta) th.push_back(t.with_max_order(N));
  const TFJet Kx = pair.Kx.with_max_order(N), Ky = pair.Ky.with_max_order(N);
  SubstitutedComponents G = substitute_map(X, Kx, Ky, th, N);
  const auto rates = pair.freq.all();
  G.x -= time_derivative(Kx, pair.R, rates);
  G.y -= time_derivative(Ky, pair.R, rates);
  for (std::size_t i = 0; i < th.size(); ++i) G.theta[i] -= time_derivative(th[i], pair.R, rates);
  return G;
}

std::array<Real, 3> map_residual_at(const ManifoldPair& pair, const TaylorFourierData& F, Real u,
                                    const std::vector<Real>& theta) {
  const Pointwise z = embed_point(pair, u, theta);
  const Real ur = pair.R.eval(u);
  const auto tw = shifted(theta, pair.freq.omega);
  std::array<Real, 3> r{};
  r[0] = qabs(F.x.eval(z.x, z.y, z.angles) - pair.Kx.eval(ur, tw));
  r[1] = qabs(F.y.eval(z.x, z.y, z.angles) - pair.Ky.eval(ur, tw));
  for (std::size_t i = 0; i < F.theta.size(); ++i)
    r[2] = std::max(r[2], qabs(z.tails[i] + F.theta[i].eval(z.x, z.y, z.angles) - pair.Ktheta[i].eval(ur, tw)));
  return r;
}

std::array<Real, 3> field_residual_at(const ManifoldPair& pair, const TaylorFourierData& X, Real u,
                                      const std::vector<Real>& theta) {
  return FieldEvaluator(pair, rates_of(X)).at(u, theta);
}

std::array<Real, 3> inverse_residual_at(const ManifoldPair& pair, const MapInverse& Fi, const UPoly& Rinv, Real u,
                                        const std::vector<Real>& theta) {
  const Pointwise z = embed_point(pair, u, theta);
  const Real ur = Rinv.eval(u);
  const auto tw = shifted(theta, neg(pair.freq.omega));
  std::array<Real, 3> r{};
  r[0] = qabs(Fi.data.x.eval(z.x, z.y, z.angles) - pair.Kx.eval(ur, tw));
  r[1] = qabs(Fi.data.y.eval(z.x, z.y, z.angles) - pair.Ky.eval(ur, tw));
  for (std::size_t i = 0; i < Fi.data.theta.size(); ++i)
    r[2] = std::max(r[2],
                    qabs(z.tails[i] + Fi.data.theta[i].eval(z.x, z.y, z.angles) - pair.Ktheta[i].eval(ur, tw)));
  return r;
}

ResidualGrid default_residual_grid(int torus_dim) {
  ResidualGrid g;
  g.u = log_grid(1e-3, 1e-2, 12);
  const int per_axis = torus_dim <= 1 ? 32 : torus_dim == 2 ? 8 : 4;
  g.theta = theta_grid(torus_dim, per_axis);
  return g;
}

ResidualReport residual_report(const ManifoldPair& pair, const ReducedMap& F, const ResidualGrid& grid) {
  return build_report(pair, grid, [&](Real u, const std::vector<Real>& th) {
    return map_residual_at(pair, F.data, u, th);
  });
}

ResidualReport flow_residual_report(const ManifoldPair& pair, const TaylorFourierData& X, const ResidualGrid& grid) {
  return field_residual_report(pair, rates_of(X), grid);
}

ResidualReport field_residual_report(const ManifoldPair& pair, const FieldRates& X, const ResidualGrid& grid) {
  FieldEvaluator ev(pair, X);
  return build_report(pair, grid, [&](Real u, const std::vector<Real>& th) { return ev.at(u, th); });
}

ResidualReport inverse_residual_report(const ManifoldPair& pair, const ReducedMap& F, const ResidualGrid& grid) {
  const int N = pair.n + 2 * std::max(pair.k, pair.p) + 1;
  // x and y are O(u^2) on the manifold, so half the degree suffices
  const MapInverse Fi = invert_reduced_map(F, N / 2 + 1);
  const UPoly Rinv = poly_reversion(pair.R, N);
  return build_report(pair, grid, [&](Real u, const std::vector<Real>& th) {
    return inverse_residual_at(pair, Fi, Rinv, u, th);
  });
}

}  // namespace ptori
