#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "problems.hpp"
#include "ptori/errors.hpp"
#include "ptori/map_solver.hpp"
#include "ptori/residual.hpp"

using namespace ptori;

namespace {

double rel(Real got, double want) { return std::fabs(to_double(got) - want) / std::fabs(want); }

}  // namespace

TEST_SUITE("map_solver") {
  TEST_CASE("leading coefficients match the closed form") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.2, 5.0);
    for (int trial = 0; trial < 12; ++trial) {
      problems::MapData m = problems::reference_data(1, 8);
      m.k = 2 + trial % 3;
      m.p = m.k / 2 + 1;
      const double c = U(rng), a = U(rng), d = U(rng);
      m.c = FourierSeries::constant(1, 8, c) + FourierSeries::cosine(1, 8, {1}, Real(0.1 * c));
      m.a = FourierSeries::constant(1, 8, a) + FourierSeries::sine(1, 8, {2}, Real(0.2 * a));
      m.d = FourierSeries::constant(1, 8, d);
      const ReducedMap F = problems::reference_map(m);
      const int k = m.k, p = m.p;
      for (Branch b : {Branch::stable, Branch::unstable}) {
        const double s = b == Branch::stable ? -1 : 1;
        const ManifoldPair K = init_order2(F, b);
        CHECK(rel(average(K.Ky.coeff(k + 1)), s * std::sqrt(2 * a / (c * (k + 1)))) < 1e-12);
        CHECK(rel(K.R.coeff(k), s * std::sqrt(c * a / (2 * (k + 1)))) < 1e-12);
        CHECK(rel(average(K.Ktheta[0].coeff(2 * p - k + 1)),
                  s * d / (2 * p - k + 1) * std::sqrt(2.0 * (k + 1) / (c * a))) < 1e-12);
      }
    }
  }

  TEST_CASE("reduced dynamics is u + R_k u^k + higher") {
    const ReducedMap F = problems::reference_map(problems::reference_data(1, 16));
    const ManifoldPair K = solve_to_order(F, Branch::stable, 6);
    CHECK(to_double(K.R.coeff(0)) == 0);
    CHECK(to_double(K.R.coeff(1)) == 1);
    CHECK(to_double(K.R.coeff(2)) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(K.R.degree() <= K.n + K.k - 1);
    CHECK(to_double(average(K.Kx.coeff(2))) == 1);
    CHECK(K.Kx.min_order() == 2);
  }

  TEST_CASE("residual orders grow with n") {
    const ReducedMap F = problems::reference_map(problems::reference_data(1, 16));
    const ResidualGrid g = default_residual_grid(1);
    ManifoldPair K = init_order2(F, Branch::stable);
    for (int n = 2; n <= 5; ++n) {
      if (n > 2) K = extend_order(K, F);
      const ResidualReport r = residual_report(K, F, g);
      CHECK(r.slope[0] == doctest::Approx(n + 2).epsilon(0.15 / (n + 2)));
      CHECK(r.slope[1] == doctest::Approx(n + 3).epsilon(0.15 / (n + 3)));
      CHECK(r.slope[2] == doctest::Approx(n + 1).epsilon(0.15 / (n + 1)));
    }
  }

  TEST_CASE("step systems agree with a dense solve") {
    const ReducedMap F = problems::reference_map(problems::reference_data(1, 16));
    std::vector<StepRecord> log;
    solve_to_order(F, Branch::stable, 7, &log);
    REQUIRE(log.size() == 5);
    for (const StepRecord& s : log) {
      const int m = static_cast<int>(s.matrix.size());
      Eigen::MatrixXd A(m, m);
      Eigen::VectorXd b(m), x(m);
      for (int i = 0; i < m; ++i) {
        b[i] = s.rhs[i];
        x[i] = s.solution[i];
        for (int j = 0; j < m; ++j) A(i, j) = s.matrix[i][j];
      }
      const double scale = A.cwiseAbs().maxCoeff() * (1 + b.cwiseAbs().maxCoeff());
      if (s.degenerate) {
        CHECK(s.n == F.k);
        CHECK(std::fabs(A.determinant()) <= 1e-12 * std::pow(A.cwiseAbs().maxCoeff(), m));
        CHECK((A * x - b).norm() <= 1e-12 * scale);
      } else {
        const Eigen::VectorXd ref = A.fullPivLu().solve(b);
        CHECK((ref - x).norm() <= 1e-12 * (1 + ref.norm()));
      }
    }
  }

  TEST_CASE("branches differ by the sign of the leading terms") {
    const ReducedMap F = problems::reference_map(problems::reference_data(1, 16));
    const ManifoldPair s = solve_to_order(F, Branch::stable, 5), u = solve_to_order(F, Branch::unstable, 5);
    CHECK(to_double(s.R.coeff(2) + u.R.coeff(2)) == 0);
    CHECK(to_double(average(s.Ky.coeff(3)) + average(u.Ky.coeff(3))) == 0);
    CHECK(to_double(average(s.Ktheta[0].coeff(1)) + average(u.Ktheta[0].coeff(1))) == 0);
    CHECK(u.branch == Branch::unstable);
  }

  TEST_CASE("bad input") {
    const ReducedMap F = problems::reference_map(problems::reference_data(1, 16));
    CHECK_THROWS_AS(solve_to_order(F, Branch::stable, 1), ConfigError);

    problems::MapData m = problems::reference_data(1, 16);
    m.a = FourierSeries::constant(1, 16, -6);
    CHECK_THROWS_AS(init_order2(problems::reference_map(m), Branch::stable), HypothesisError);

    ReducedMap R = problems::reference_map(problems::reference_data(1, 16));
    R.freq.omega = {Real(1) / 2};
    CHECK_THROWS_AS(init_order2(R, Branch::stable), SmallDivisorUnderflow);
  }
}
