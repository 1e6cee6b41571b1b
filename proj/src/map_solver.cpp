#include "ptori/map_solver.hpp"

#include <algorithm>

#include "ptori/errors.hpp"

namespace ptori {

int truncation_order(int n, int k, int p) { return n + 2 * std::max(k, p); }

namespace detail {

namespace {

SubstitutedComponents residual_jets(const ManifoldPair& pair, const LeadingData& L, int N) {
  return L.setting == Setting::map ? map_residual_jets(pair, *L.data, N) : field_residual_jets(pair, *L.data, N);
}

FourierSeries sd(const FourierSeries& h, const Frequency& freq, Setting s) {
  return s == Setting::map ? solve_sd_map(h, freq) : solve_sd_flow(h, freq);
}

Real leading_c(const LeadingData& L) { return average(L.data->x.get(0, 1)); }
Real leading_a(const LeadingData& L) { return average(L.data->y.get(L.k, 0)); }
Real leading_d(const LeadingData& L, int i) { return average(L.data->theta[i].get(L.p, 0)); }

// Oscillatory terms at the orders annihilated by the step from n: K~^x_{n+k}, K~^y_{n+2k-1}, K~^theta_{n+2p-1}
void solve_oscillatory(ManifoldPair& pair, const LeadingData& L, int n) {
  const int N = truncation_order(n, L.k, L.p);
  const SubstitutedComponents G = residual_jets(pair, L, N);
  const int ox = n + L.k, oy = n + 2 * L.k - 1, ot = n + 2 * L.p - 1;
  pair.Kx.add_coeff(ox, sd(oscillatory(G.x.coeff(ox)), L.freq, L.setting));
  pair.Ky.add_coeff(oy, sd(oscillatory(G.y.coeff(oy)), L.freq, L.setting));
  for (std::size_t i = 0; i < pair.Ktheta.size(); ++i)
    pair.Ktheta[i].add_coeff(ot, sd(oscillatory(G.theta[i].coeff(ot)), L.freq, L.setting));
}

FourierSeries constant(const ManifoldPair& pair, Real v) {
  return FourierSeries::constant(pair.Kx.dim(), pair.Kx.max_mode(), v);
}

}  // namespace

void check_margin(const Frequency& freq, int max_mode, Setting setting) {
  const auto all = setting == Setting::map ? freq.omega : freq.all();
  if (all.empty() || max_mode == 0) return;
  const MarginReport m = diophantine_margin(freq, max_mode, setting);
  if (m.margin < freq.diophantine_floor) {
    std::string mode;
    for (std::size_t i = 0; i < m.argmin.size(); ++i) mode += (i ? "," : "") + std::to_string(m.argmin[i]);
    throw SmallDivisorUnderflow(m.argmin, to_double(m.margin),
                                "small divisor below the floor at mode k=(" + mode + "), |divisor|=" +
                                    to_string(m.margin));
  }
}

ManifoldPair init_pair(const LeadingData& L, Branch branch) {
  const TaylorFourierData& D = *L.data;
  const int k = L.k, p = L.p, d = D.angle_dim();
  const int dim = D.torus_dim(), M = D.max_mode();
  const Real c = leading_c(L), a = leading_a(L);
  if (!(c > 0)) throw HypothesisError("NonPositiveLeadingCoefficient", "the average of c must be positive");
  if (!(a > 0)) throw HypothesisError("NonPositiveLeadingCoefficient", "the average of a_k must be positive");
  check_margin(L.freq, M, L.setting);

  const Real sgn = branch == Branch::stable ? -1 : 1;
  const Real kp1 = k + 1;
  const Real Ky = sgn * qsqrt(2 * a / (c * kp1));
  const Real Rk = sgn * qsqrt(c * a / (2 * kp1));

  ManifoldPair pair;
  pair.setting = L.setting;
  pair.freq = L.freq;
  pair.branch = branch;
  pair.k = k;
  pair.p = p;
  pair.n = 1;
  const int N = truncation_order(1, k, p);
  pair.Kx = TFJet(dim, M, N);
  pair.Kx.set_coeff(2, FourierSeries::constant(dim, M, 1));
  pair.Ky = TFJet(dim, M, N);
  pair.Ky.set_coeff(k + 1, FourierSeries::constant(dim, M, Ky));
  for (int i = 0; i < d; ++i) {
    const Real Kt = sgn * (leading_d(L, i) / Real(2 * p - k + 1)) * qsqrt(2 * kp1 / (c * a));
    TFJet t(dim, M, N, true);
    t.set_coeff(2 * p - k + 1, FourierSeries::constant(dim, M, Kt));
    pair.Ktheta.push_back(t);
  }
  pair.R = UPoly::tangent(k, Rk);
  if (L.setting == Setting::flow) pair.R.set(1, 0);  // Y(u) = Y_k u^k + ...
  solve_oscillatory(pair, L, 1);
  pair.n = 2;
  return pair;
}

ManifoldPair extend_pair(const ManifoldPair& in, const LeadingData& L, StepRecord* record) {
  const int n = in.n, k = L.k, p = L.p, d = static_cast<int>(in.Ktheta.size());
  const int N = truncation_order(n, k, p);
  ManifoldPair pair = in;
  pair.Kx = in.Kx.with_max_order(N);
  pair.Ky = in.Ky.with_max_order(N);
  for (auto& t : pair.Ktheta) t = t.with_max_order(N);

  const SubstitutedComponents G = residual_jets(pair, L, N);
  const Real gx = average(G.x.coeff(n + k));
  const Real gy = average(G.y.coeff(n + 2 * k - 1));
  std::vector<Real> gt(d);
  for (int i = 0; i < d; ++i) gt[i] = average(G.theta[i].coeff(n + 2 * p - 1));

  const Real c = leading_c(L), a = leading_a(L);
  const Real Rk = in.R.coeff(k);
  const Real Ky1 = average(in.Ky.coeff(k + 1));
  std::vector<Real> Kt1(d), dp(d);
  for (int i = 0; i < d; ++i) {
    Kt1[i] = average(in.Ktheta[i].coeff(2 * p - k + 1));
    dp[i] = leading_d(L, i);
  }

  // rows x, y, theta_i; columns Kx, Ky, Ktheta_i
  const Real m11 = -Real(n + 1) * Rk, m12 = c;
  const Real m21 = Real(k) * a, m22 = -Real(n + k) * Rk;
  Real rnew = 0, X = 0, Y = 0;
  const bool degenerate = n == k;
  if (degenerate) {
    rnew = (2 * Real(k) * Rk * gx + c * gy) / (2 * Real(3 * k + 1) * Rk);
    X = 0;
    Y = (-gx + 2 * rnew) / c;
  } else {
    const Real det = m11 * m22 - m12 * m21;
    const Real scale = qabs(m11 * m22) + qabs(m12 * m21);
    if (qabs(det) <= Real(1e-12) * scale)
      throw HypothesisError("SingularSystem", "step n=" + std::to_string(n) + ": constant-coefficient system is singular");
    const Real b1 = -gx, b2 = -gy;
    X = (b1 * m22 - m12 * b2) / det;
    Y = (m11 * b2 - m21 * b1) / det;
  }
  const Real b1 = -gx + 2 * rnew, b2 = -gy + Real(k + 1) * Ky1 * rnew;
  std::vector<Real> T(d), bt(d);
  const Real mtt = -Real(n + 2 * p - k) * Rk;
  for (int i = 0; i < d; ++i) {
    bt[i] = -gt[i] + Real(2 * p - k + 1) * Kt1[i] * rnew;
    T[i] = (bt[i] - Real(p) * dp[i] * X) / mtt;
  }

  if (record) {
    StepRecord& r = *record;
    r = StepRecord{};
    r.n = n;
    r.degenerate = degenerate;
    r.r_new = to_double(rnew);
    const int sz = 2 + d;
    r.matrix.assign(sz, std::vector<double>(sz, 0.0));
    r.matrix[0][0] = to_double(m11);
    r.matrix[0][1] = to_double(m12);
    r.matrix[1][0] = to_double(m21);
    r.matrix[1][1] = to_double(m22);
    r.rhs = {to_double(b1), to_double(b2)};
    r.solution = {to_double(X), to_double(Y)};
    r.g_avg = {to_double(gx), to_double(gy)};
    for (int i = 0; i < d; ++i) {
      r.matrix[2 + i][0] = to_double(Real(p) * dp[i]);
      r.matrix[2 + i][2 + i] = to_double(mtt);
      r.rhs.push_back(to_double(bt[i]));
      r.solution.push_back(to_double(T[i]));
      r.g_avg.push_back(to_double(gt[i]));
    }
  }

  pair.Kx.add_coeff(n + 1, constant(pair, X));
  pair.Ky.add_coeff(n + k, constant(pair, Y));
  for (int i = 0; i < d; ++i) pair.Ktheta[i].add_coeff(n + 2 * p - k, constant(pair, T[i]));
  if (rnew != 0) pair.R.set(n + k - 1, pair.R.coeff(n + k - 1) + rnew);
  solve_oscillatory(pair, L, n);
  pair.n = n + 1;
  return pair;
}

}  // namespace detail

namespace {

detail::LeadingData leading(const ReducedMap& F) {
  detail::LeadingData L;
  L.setting = Setting::map;
  L.data = &F.data;
  L.k = F.k;
  L.p = F.p;
  L.freq = F.freq;
  return L;
}

}  // namespace

ManifoldPair init_order2(const ReducedMap& F, Branch branch) {
  validate_reduced_map(F, true);
  return detail::init_pair(leading(F), branch);
}

ManifoldPair extend_order(const ManifoldPair& pair, const ReducedMap& F, StepRecord* record) {
  if (pair.setting != Setting::map || pair.helicoure)
    throw DimensionMismatch("extend_order: pair was not produced by the map solver");
  return detail::extend_pair(pair, leading(F), record);
}

ManifoldPair solve_to_order(const ReducedMap& F, Branch branch, int n_target, std::vector<StepRecord>* log) {
  if (n_target < 2) throw ConfigError("target order must be at least 2");
  ManifoldPair pair = init_order2(F, branch);
  while (pair.n < n_target) {
    StepRecord rec;
    pair = extend_order(pair, F, &rec);
    if (log) log->push_back(rec);
  }
  return pair;
}

ManifoldPair unstable_pair(const ReducedMap& F, int n_target, ResidualReport* inverse_report) {
  ManifoldPair pair = solve_to_order(F, Branch::unstable, n_target);
  if (inverse_report) *inverse_report = inverse_residual_report(pair, F, default_residual_grid(F.freq.d()));
  return pair;
}

}  // namespace ptori
