// Acceptance checks, one line per criterion. Exit status is the number of failures.
#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "problems.hpp"
#include "ptori/applications.hpp"
#include "ptori/flow_solver.hpp"
#include "ptori/io.hpp"
#include "ptori/map_solver.hpp"
#include "ptori/operators.hpp"

using namespace ptori;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

// closed-form lowest-order coefficients, maps
Outcome closed_form() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.1, 10.0);
  double worst = 0;
  for (int t = 0; t < 50; ++t) {
    problems::MapData m = problems::reference_data(1, 8);
    m.k = 2 + t % 3;
    const int pmin = m.k / 2 + 1;  // 2p > k-1
    m.p = pmin + (t / 3) % 3;
    const double c = U(rng), a = U(rng), d = U(rng);
    m.c = FourierSeries::constant(1, 8, c) + FourierSeries::cosine(1, 8, {1}, Real(0.05 * c));
    m.a = FourierSeries::constant(1, 8, a) + FourierSeries::cosine(1, 8, {2}, Real(0.1 * a));
    m.d = FourierSeries::constant(1, 8, d) + FourierSeries::sine(1, 8, {1}, Real(0.1 * d));
    m.degree = m.k + m.p + 4;
    const ReducedMap F = problems::reference_map(m);
    const int k = m.k, p = m.p;
    for (Branch b : {Branch::stable, Branch::unstable}) {
      const double s = b == Branch::stable ? -1 : 1;
      const ManifoldPair K = init_order2(F, b);
      worst = std::max(worst, rel(to_double(average(K.Ky.coeff(k + 1))), s * std::sqrt(2 * a / (c * (k + 1)))));
      worst = std::max(worst, rel(to_double(K.R.coeff(k)), s * std::sqrt(c * a / (2 * (k + 1)))));
      worst = std::max(worst, rel(to_double(average(K.Ktheta[0].coeff(2 * p - k + 1))),
                                  s * d / (2 * p - k + 1) * std::sqrt(2.0 * (k + 1) / (c * a))));
    }
  }
  return {worst <= 1e-12, fmt("50 random problems, k in {2,3,4}, both branches: max rel err %.2e (tol 1e-12)", worst)};
}

template <class Pair, class Extend, class Report>
Outcome slopes(Pair K, Extend extend, Report report) {
  double worst = 0;
  std::string worst_at;
  for (int n = 2; n <= 8; ++n) {
    if (n > 2) K = extend(K);
    const ResidualReport r = report(K);
    const int want[3] = {n + 2, n + 3, n + 1};
    for (int c = 0; c < 3; ++c) {
      const double e = std::isfinite(r.slope[c]) ? std::fabs(r.slope[c] - want[c]) : 1e9;
      if (e > worst) {
        worst = e;
        worst_at = fmt("n=%d component %d slope %.4f want %d", n, c, r.slope[c], want[c]);
      }
    }
  }
  return {worst <= 0.15, fmt("n = 2..8: max |slope - expected| %.4f (tol 0.15) at %s", worst, worst_at.c_str())};
}

Outcome map_slopes() {
  const ReducedMap F = problems::reference_map();
  const ResidualGrid g = default_residual_grid(1);
  return slopes(init_order2(F, Branch::stable), [&](const ManifoldPair& K) { return extend_order(K, F); },
                [&](const ManifoldPair& K) { return residual_report(K, F, g); });
}

Outcome flow_slopes() {
  const ReducedField X = problems::reference_field();
  const ResidualGrid g = default_residual_grid(2);
  return slopes(init_order2_flow(X, Branch::stable), [&](const FlowPair& K) { return extend_order_flow(K, X); },
                [&](const FlowPair& K) { return flow_residual_report(K, X, g); });
}

// determinant and least-squares consistency of the step system at n = k
Outcome degenerate_step() {
  double worst_det = 0, worst_res = 0;
  int cases = 0;
  auto check = [&](const StepRecord& s) {
    const int m = static_cast<int>(s.matrix.size());
    Eigen::MatrixXd A(m, m);
    Eigen::VectorXd b(m);
    for (int i = 0; i < m; ++i) {
      b[i] = s.rhs[i];
      for (int j = 0; j < m; ++j) A(i, j) = s.matrix[i][j];
    }
    const double scale = A.cwiseAbs().maxCoeff();
    worst_det = std::max(worst_det, std::fabs(A.determinant()) / std::pow(scale, m));
    const Eigen::VectorXd x = A.completeOrthogonalDecomposition().solve(b);
    worst_res = std::max(worst_res, (A * x - b).norm() / (scale * (1 + b.norm())));
    ++cases;
  };
  for (int k : {2, 3}) {
    problems::MapData m = problems::reference_data(1, 16);
    m.k = k;
    m.p = k;
    const ReducedMap F = problems::reference_map(m);
    std::vector<StepRecord> log;
    solve_to_order(F, Branch::stable, k + 1, &log);
    for (const auto& s : log)
      if (s.n == k) check(s);
    TFPoly P;
    std::vector<TFPoly> Q;
    problems::MapData f = problems::reference_data(2, 8);
    f.k = k;
    f.p = k;
    problems::build(f, P, Q);
    Frequency fr;
    fr.omega = {problems::golden()};
    fr.nu = {qsqrt(Real(2))};
    const ReducedField X = make_reduced_field(f.c, P, Q, k, k, fr);
    log.clear();
    solve_flow_to_order(X, Branch::stable, k + 1, &log);
    for (const auto& s : log)
      if (s.n == k) check(s);
  }
  const bool ok = cases == 4 && worst_det <= 1e-12 && worst_res <= 1e-12;
  return {ok, fmt("%d systems (maps and flows, k = 2, 3): max |det|/scale %.2e, least-squares residual %.2e (tol 1e-12)",
                  cases, worst_det, worst_res)};
}

// small divisors solvers against direct summation on a 256 grid
Outcome sd_fidelity() {
  std::mt19937_64 rng(5);
  Frequency f;
  f.omega = {problems::golden()};
  const double w = to_double(f.omega[0]);
  double worst_map = 0, worst_flow = 0;
  for (int t = 0; t < 5; ++t) {
    const FourierSeries h = oracle::random_series(rng, 1, 64, 64, true, 0.8);
    const FourierSeries pm = solve_sd_map(h, f), pf = solve_sd_flow(h, f);
    double hn = 0, em = 0, ef = 0;
    for (int i = 0; i < 256; ++i) {
      const double th = i / 256.0;
      const double hv = oracle::direct_eval(h, {th});
      hn = std::max(hn, std::fabs(hv));
      em = std::max(em, std::fabs(oracle::direct_eval(pm, {th + w}) - oracle::direct_eval(pm, {th}) - hv));
      // d phi/d theta * omega by direct summation
      double dv = 0;
      pf.for_each_half([&](const Mode& k, const Complex& c) {
        if (k[0] == 0) return;
        const std::complex<double> e = std::polar(1.0, 2 * std::numbers::pi * k[0] * th);
        const std::complex<double> term = to_double(c) * e * std::complex<double>(0, 2 * std::numbers::pi * k[0]);
        dv += 2 * term.real();
      });
      ef = std::max(ef, std::fabs(dv * w - hv));
    }
    worst_map = std::max(worst_map, em / hn);
    worst_flow = std::max(worst_flow, ef / hn);
  }
  return {worst_map <= 1e-10 && worst_flow <= 1e-10,
          fmt("M = 64, 5 random zero-average h: difference eq %.2e, derivative eq %.2e relative to ||h|| (tol 1e-10)",
              worst_map, worst_flow)};
}

Outcome sector_iterates() {
  const Sector s{std::numbers::pi / 2, 0.05, 2};
  const UPoly R(std::vector<Real>{0, 1, -1});
  const SectorReport r = sector_iterate_check(R, s, make_mu_bound(0.5, s, -1), 1000, sector_samples(s, 20, 20), false);
  return {r.ok && r.min_slack >= 0,
          fmt("R = u - u^2, beta = pi/2, rho = 0.05, mu = 0.5, 1000 iterates of %zu samples: min slack %.3e", r.samples,
              r.min_slack)};
}

Outcome inverses() {
  const ReducedMap F = problems::reference_map();
  const ManifoldPair K = solve_to_order(F, Branch::stable, 8);
  const int k = 2, order = K.n + k - 1;
  const Sector s{std::numbers::pi / 2, 0.05, k};
  const std::vector<double> omega{to_double(problems::golden())};
  const ComplexDefect eta = [order](ComplexD u, const std::vector<double>& th) {
    return std::pow(u, order) * (1.0 + 0.5 * std::cos(2 * std::numbers::pi * th[0]));
  };
  TailControl tc;
  tc.k = k;
  tc.order = order;
  tc.eta_norm = 1.5;
  tc.mu = 0.5 * mu_limit(s, to_double(K.R.coeff(k)));
  const auto pts = sector_samples(s, 5, 10);

  double orbit = 0;
  const ComplexDefect inv = [&](ComplexD u, const std::vector<double>& th) {
    TailControl t = tc;
    t.tol = 1e-12 * std::pow(std::abs(u), order);
    return orbit_sum_inverse(eta, K.R, omega, u, th, t).value;
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::vector<double> th{double(i) / pts.size()};
    orbit = std::max(orbit, std::abs(apply_shift_operator(inv, K.R, omega, pts[i], th) - eta(pts[i], th)) /
                                std::abs(eta(pts[i], th)));
  }

  const FlowDrift J{UPoly(std::vector<Real>{0, 0, K.R.coeff(k)}), omega};
  const ComplexDefect finv = [&](ComplexD u, const std::vector<double>& th) {
    TailControl t = tc;
    t.tol = 1e-13 * std::pow(std::abs(u), order);
    t.quad_rel = 1e-15;
    return flow_inverse(eta, J, u, th, t, &s).value;
  };
  double flow = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::vector<double> th{double(i) / pts.size()};
    double fastest = std::abs(J.Y.eval_double(pts[i])) / std::abs(pts[i]);
    fastest = std::max(fastest, 2 * std::numbers::pi * omega[0]);
    const double h = 0.02 / fastest;
    const ComplexD d = (4.0 * directional_derivative(finv, J, pts[i], th, h) -
                        directional_derivative(finv, J, pts[i], th, 2 * h)) / 3.0;
    flow = std::max(flow, std::abs(d - eta(pts[i], th)) / std::abs(eta(pts[i], th)));
  }

  // int_0^inf (u/(1+su))^3 ds = u^2/2
  TailControl oc;
  oc.k = 2;
  oc.order = 3;
  oc.eta_norm = 1;
  oc.mu = 0.9;
  oc.tol = 1e-16;
  double oracle_err = 0;
  for (double u : {0.005, 0.01, 0.03}) {
    const InverseValue v = flow_inverse([](ComplexD z, const std::vector<double>&) { return z * z * z; },
                                        FlowDrift{UPoly(std::vector<Real>{0, 0, -1}), {}}, u, {}, oc);
    oracle_err = std::max(oracle_err, std::fabs(-v.value.real() - u * u / 2) / (u * u / 2));
  }
  return {orbit <= 1e-6 && flow <= 1e-6 && oracle_err <= 1e-8,
          fmt("50 sector points: orbit sum %.2e, flow quadrature %.2e (tol 1e-6); analytic oracle %.2e (tol 1e-8)", orbit,
              flow, oracle_err)};
}

Outcome hecu() {
  HeCuParams P = default_hecu(16);
  P.D = Real(6.35);
  P.alpha_morse = Real(1.05);
  P.m = 1;
  P.h = 2 * P.D;
  const HeCuResult r = hecu_manifolds(P, 6);
  const double D = 6.35, a = 1.05, m = 1, h = 2 * D;
  const double K2 = -1 / (4 * m * D), K1 = -1 / (a * std::sqrt(2 * m * (h - D))), Y2 = a / (2 * m),
               w = std::sqrt(2 * (h - D) / m);
  const double sK2 = to_double(average(r.stable.Ky.coeff(2))), sK1 = to_double(average(r.stable.Ktheta[0].coeff(1)));
  const double uK2 = to_double(average(r.unstable.Ky.coeff(2))), uK1 = to_double(average(r.unstable.Ktheta[0].coeff(1)));
  const double sY = to_double(r.stable.R.coeff(2)), uY = to_double(r.unstable.R.coeff(2));
  const double eK2 = rel(sK2, K2), eK1 = rel(sK1, K1), eY = rel(-sY, Y2), eW = rel(to_double(r.field.omega), w);
  // stable Y = -Y_2 u^2, unstable Y = +Y_2 u^2, shared magnitudes
  const bool signs = sY < 0 && uY > 0 && rel(std::fabs(uK2), std::fabs(K2)) <= 1e-10 &&
                     std::fabs(std::fabs(uK1) - std::fabs(sK1)) <= 1e-10 * std::max(1.0, std::fabs(sK1));
  const bool ok = eK2 <= 1e-10 && eK1 <= 1e-10 && eY <= 1e-10 && eW <= 1e-10 && signs;
  return {ok, fmt("K2^y %.2e, Y2 %.2e, omega %.2e, branch signs %s; K1^theta computed %.6g vs %.6g (rel %.2e)", eK2, eY,
                  eW, signs ? "ok" : "wrong", sK1, K1, eK1)};
}

Outcome a_posteriori() {
  const ReducedMap F = problems::reference_map();
  ManifoldPair a = solve_to_order(F, Branch::stable, 2);
  bool ok = true;
  std::string worst;
  for (int n = 2; n <= 6; ++n) {
    const ManifoldPair b = extend_order(a, F);
    const CompareReport r = compare_pairs(a, b);
    const int want[3] = {n + 1, n + 2, n};
    for (int c = 0; c < 3; ++c) {
      const int got = r.components[c].lowest_order;
      if (got >= 0 && got < want[c]) {
        ok = false;
        worst += fmt(" n=%d %s order %d < %d", n, r.components[c].name.c_str(), got, want[c]);
      }
    }
    if (n == 6)
      worst += fmt(" (n=6: Kx %d, Ky %d, Ktheta %d)", r.components[0].lowest_order, r.components[1].lowest_order,
                   r.components[2].lowest_order);
    a = b;
  }
  return {ok, "difference orders of compare(n, n+1) for n = 2..6 at least (n+1, n+2, n):" + worst};
}

Outcome contraction() {
  const ReducedMap F = problems::reference_map();
  const ManifoldPair K = solve_to_order(F, Branch::stable, 8);
  ContractionOptions o;
  o.rho = 0.02;
  const ContractionReport r = contraction_probe(F, K, o);
  int run = 0, best = 0;
  for (double f : r.factors) {
    run = f < 1 ? run + 1 : 0;
    best = std::max(best, run);
  }
  return {best >= 10 && r.residual_monotone,
          fmt("n = 8, rho = 0.02: %d consecutive factors < 1 (max %.3f), residual %s from %.3e to %.3e", best,
              r.max_factor, r.residual_monotone ? "monotone" : "not monotone", r.residuals.front(), r.residuals.back())};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int only = 0;
  app.add_option("--only", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form coefficients (maps)", closed_form},
      {"residual orders (maps)", map_slopes},
      {"residual orders (flows)", flow_slopes},
      {"degenerate step", degenerate_step},
      {"small divisors solvers", sd_fidelity},
      {"sector iterates", sector_iterates},
      {"operator inverses", inverses},
      {"He-Cu coefficients", hecu},
      {"a posteriori difference orders", a_posteriori},
      {"contraction probe", contraction},
  };
  const double budget[] = {5, 60, 120, 0, 0, 0, 0, 30, 0, 0};

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    if (only && static_cast<int>(i) + 1 != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget[i] > 0 && secs > budget[i]) {
      o.pass = false;
      o.detail += fmt("; runtime %.1f s over the %.0f s budget", secs, budget[i]);
    }
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  return failures;
}
