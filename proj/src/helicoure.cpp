#include "ptori/helicoure.hpp"

#include "ptori/errors.hpp"

namespace ptori {

namespace {

HypothesisError structure(const std::string& what) { return HypothesisError("StructureViolation", what); }

int truncation(int n) { return n + 3; }

void solve_oscillatory(FlowPair& pair, const HelicoureField& X, int n) {
  const SubstitutedComponents G = field_residual_jets(pair, X.data, truncation(n));
  pair.Kx.add_coeff(n + 2, solve_sd_flow(oscillatory(G.x.coeff(n + 2)), X.freq));
  pair.Ky.add_coeff(n + 3, solve_sd_flow(oscillatory(G.y.coeff(n + 3)), X.freq));
  for (std::size_t i = 0; i < pair.Ktheta.size(); ++i)
    pair.Ktheta[i].add_coeff(n + 2, solve_sd_flow(oscillatory(G.theta[i].coeff(n + 2)), X.freq));
}

FourierSeries constant(const FlowPair& pair, Real v) {
  return FourierSeries::constant(pair.Kx.dim(), pair.Kx.max_mode(), v);
}

}  // namespace

void validate_helicoure_field(const HelicoureField& X) {
  const int dim = X.freq.torus_dim();
  if (X.data.angle_dim() != X.freq.d())
    throw DimensionMismatch("helicoure field: number of angle components does not match omega");
  if (X.data.x.dim() != dim || X.data.y.dim() != dim)
    throw DimensionMismatch("helicoure field: torus dimension does not match the frequency");
  for (const auto& t : X.data.theta)
    if (t.dim() != dim) throw DimensionMismatch("helicoure field: torus dimension does not match the frequency");

  for (const auto& [e, s] : X.data.x.terms()) {
    const int l = e.first, m = e.second;
    if (e == Exponent{0, 1} || (m >= 1 && l + m >= 2) || l >= 3) continue;
    throw structure("helicoure x-component: term x^" + std::to_string(l) + " y^" + std::to_string(m) +
                    " is not allowed");
  }
  for (const auto& [e, s] : X.data.y.terms()) {
    const int l = e.first, m = e.second;
    if (e == Exponent{1, 1} || m >= 2 || (m == 1 && l >= 2) || (m == 0 && l >= 4)) continue;
    throw structure("helicoure y-component: term x^" + std::to_string(l) + " y^" + std::to_string(m) +
                    " is not allowed");
  }
  for (const auto& t : X.data.theta)
    for (const auto& [e, s] : t.terms()) {
      const int l = e.first, m = e.second;
      if (e == Exponent{0, 1} || l + m >= 2) continue;
      throw structure("helicoure theta-component: term x^" + std::to_string(l) + " y^" + std::to_string(m) +
                      " is not allowed");
    }

  if (!(average(X.c()) > 0)) throw HypothesisError("NonPositiveLeadingCoefficient", "the average of c must be positive");
  if (average(X.b()) == 0) throw HypothesisError("ZeroLeadingCoefficient", "the average of b vanishes");
  for (int i = 0; i < X.data.angle_dim(); ++i)
    if (average(X.d(i)) == 0) throw HypothesisError("ZeroLeadingCoefficient", "the average of d vanishes");
}

FlowPair init_helicoure(const HelicoureField& X, Branch branch) {
  validate_helicoure_field(X);
  const int dim = X.freq.torus_dim(), M = X.data.max_mode(), d = X.data.angle_dim();
  detail::check_margin(X.freq, M, Setting::flow);
  const Real c = average(X.c()), b = average(X.b());
  const Real Y2 = b / 2;
  if (branch == Branch::stable && !(Y2 < 0))
    throw HypothesisError("HypothesisViolated", "the stable branch needs a negative average of b");
  if (branch == Branch::unstable && !(Y2 > 0))
    throw HypothesisError("HypothesisViolated", "the unstable branch needs a positive average of b");
  const Real K2 = Y2 / c;

  FlowPair pair;
  pair.setting = Setting::flow;
  pair.helicoure = true;
  pair.freq = X.freq;
  pair.branch = branch;
  pair.k = 2;
  pair.p = 1;
  pair.n = 0;
  const int N = truncation(0);
  pair.Kx = TFJet(dim, M, N);
  pair.Kx.set_coeff(1, FourierSeries::constant(dim, M, 1));
  pair.Ky = TFJet(dim, M, N);
  pair.Ky.set_coeff(2, FourierSeries::constant(dim, M, K2));
  for (int i = 0; i < d; ++i) {
    const Real K1 = (average(X.d(i)) * K2 + average(X.e20(i))) / Y2;
    TFJet t(dim, M, N, true);
    t.set_coeff(1, FourierSeries::constant(dim, M, K1));
    pair.Ktheta.push_back(t);
  }
  pair.R = UPoly(std::vector<Real>{0, 0, Y2});
  solve_oscillatory(pair, X, 0);
  pair.n = 1;
  return pair;
}

FlowPair extend_helicoure(const FlowPair& in, const HelicoureField& X, StepRecord* record) {
  if (!in.helicoure) throw DimensionMismatch("extend_helicoure: pair was not produced by the helicoure solver");
  const int n = in.n, d = static_cast<int>(in.Ktheta.size());
  const int N = truncation(n);
  FlowPair pair = in;
  pair.Kx = in.Kx.with_max_order(N);
  pair.Ky = in.Ky.with_max_order(N);
  for (auto& t : pair.Ktheta) t = t.with_max_order(N);

  const SubstitutedComponents G = field_residual_jets(pair, X.data, N);
  const Real gx = average(G.x.coeff(n + 2)), gy = average(G.y.coeff(n + 3));
  std::vector<Real> gt(d), dd(d), ee(d), K1(d);
  for (int i = 0; i < d; ++i) {
    gt[i] = average(G.theta[i].coeff(n + 2));
    dd[i] = average(X.d(i));
    ee[i] = average(X.e20(i));
    K1[i] = average(in.Ktheta[i].coeff(1));
  }
  const Real c = average(X.c()), b = average(X.b());
  const Real Y2 = in.R.coeff(2), K2 = average(in.Ky.coeff(2));

  // rows x, y; columns Kx_{n+1}, Ky_{n+2}, Y_{n+2}
  const Real a11 = -Real(n + 1) * Y2, a12 = c, a13 = -1;
  const Real a21 = b * K2, a22 = b - Real(n + 2) * Y2, a23 = -2 * K2;
  Real Kx = 0, Ky = 0, Yn = 0;
  const bool degenerate = n == 1;
  if (degenerate) {
    // Kx_2 is free (reparametrization u -> u + s u^2); fixed to zero
    const Real det = a12 * a23 - a13 * a22;
    if (qabs(det) <= Real(1e-12) * (qabs(a12 * a23) + qabs(a13 * a22)))
      throw HypothesisError("SingularSystem", "helicoure step n=1: system is singular");
    Ky = (-gx * a23 - a13 * -gy) / det;
    Yn = (a12 * -gy - a22 * -gx) / det;
  } else {
    const Real det = a11 * a22 - a12 * a21;
    if (qabs(det) <= Real(1e-12) * (qabs(a11 * a22) + qabs(a12 * a21)))
      throw HypothesisError("SingularSystem", "helicoure step n=" + std::to_string(n) + ": system is singular");
    Kx = (-gx * a22 - a12 * -gy) / det;
    Ky = (a11 * -gy - a21 * -gx) / det;
  }
  const Real att = -Real(n + 1) * Y2;
  std::vector<Real> T(d);
  for (int i = 0; i < d; ++i) T[i] = (-gt[i] - 2 * ee[i] * Kx - dd[i] * Ky + K1[i] * Yn) / att;

  if (record) {
    StepRecord& r = *record;
    r = StepRecord{};
    r.n = n;
    r.degenerate = degenerate;
    r.r_new = to_double(Yn);
    const int sz = 2 + d;
    r.matrix.assign(sz, std::vector<double>(sz, 0.0));
    r.matrix[0][0] = to_double(a11);
    r.matrix[0][1] = to_double(a12);
    r.matrix[1][0] = to_double(a21);
    r.matrix[1][1] = to_double(a22);
    r.rhs = {to_double(-gx - a13 * Yn), to_double(-gy - a23 * Yn)};
    r.solution = {to_double(Kx), to_double(Ky)};
    r.g_avg = {to_double(gx), to_double(gy)};
    for (int i = 0; i < d; ++i) {
      r.matrix[2 + i][0] = to_double(2 * ee[i]);
      r.matrix[2 + i][1] = to_double(dd[i]);
      r.matrix[2 + i][2 + i] = to_double(att);
      r.rhs.push_back(to_double(-gt[i] + K1[i] * Yn));
      r.solution.push_back(to_double(T[i]));
      r.g_avg.push_back(to_double(gt[i]));
    }
  }

  pair.Kx.add_coeff(n + 1, constant(pair, Kx));
  pair.Ky.add_coeff(n + 2, constant(pair, Ky));
  for (int i = 0; i < d; ++i) pair.Ktheta[i].add_coeff(n + 1, constant(pair, T[i]));
  if (Yn != 0) pair.R.set(n + 2, Yn);
  solve_oscillatory(pair, X, n);
  pair.n = n + 1;
  return pair;
}

FlowPair solve_helicoure(const HelicoureField& X, int n_target, Branch branch, std::vector<StepRecord>* log) {
  if (n_target < 1) throw ConfigError("target order must be at least 1");
  FlowPair pair = init_helicoure(X, branch);
  while (pair.n < n_target) {
    StepRecord rec;
    pair = extend_helicoure(pair, X, &rec);
    if (log) log->push_back(rec);
  }
  return pair;
}

ResidualReport helicoure_residual_report(const FlowPair& pair, const HelicoureField& X, const ResidualGrid& grid) {
  return flow_residual_report(pair, X.data, grid);
}

}  // namespace ptori
