#include <cmath>

#include "doctest.h"
#include "problems.hpp"
#include "ptori/errors.hpp"
#include "ptori/flow_solver.hpp"
#include "ptori/helicoure.hpp"

using namespace ptori;

TEST_SUITE("flow_solver") {
  TEST_CASE("leading coefficients of the field") {
    const ReducedField X = problems::reference_field();
    const FlowPair K = init_order2_flow(X, Branch::stable);
    // c = 1, a = 6, d = 1, k = 2
    CHECK(to_double(average(K.Ky.coeff(3))) == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(to_double(K.R.coeff(2)) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(to_double(average(K.Ktheta[0].coeff(1))) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(to_double(K.R.coeff(1)) == 0);
  }

  TEST_CASE("residual orders on T^2") {
    const ReducedField X = problems::reference_field();
    const ResidualGrid g = default_residual_grid(2);
    FlowPair K = init_order2_flow(X, Branch::stable);
    for (int n = 2; n <= 5; ++n) {
      if (n > 2) K = extend_order_flow(K, X);
      const ResidualReport r = flow_residual_report(K, X, g);
      CHECK(r.slope[0] == doctest::Approx(n + 2).epsilon(0.15 / (n + 2)));
      CHECK(r.slope[1] == doctest::Approx(n + 3).epsilon(0.15 / (n + 3)));
      CHECK(r.slope[2] == doctest::Approx(n + 1).epsilon(0.15 / (n + 1)));
    }
  }

  TEST_CASE("unstable branch flips Y") {
    const ReducedField X = problems::reference_field();
    const FlowPair s = solve_flow_to_order(X, Branch::stable, 4), u = solve_flow_to_order(X, Branch::unstable, 4);
    CHECK(to_double(s.R.coeff(2) + u.R.coeff(2)) == 0);
  }

  TEST_CASE("resonant frequency is rejected") {
    ReducedField X = problems::reference_field();
    X.freq.nu = {X.freq.omega[0]};
    CHECK_THROWS_AS(init_order2_flow(X, Branch::stable), SmallDivisorUnderflow);
  }
}

TEST_SUITE("helicoure") {
  HelicoureField field(double c, double b, double d) {
    HelicoureField X;
    X.freq.omega = {problems::golden()};
    const int M = 8, D = 12;
    X.data.x = TFPoly(1, M, D);
    X.data.x.add(0, 1, FourierSeries::constant(1, M, c));
    X.data.x.add(3, 0, FourierSeries::constant(1, M, Real(0.2)));
    X.data.y = TFPoly(1, M, D);
    X.data.y.add(1, 1, FourierSeries::constant(1, M, b));
    X.data.y.add(0, 2, FourierSeries::cosine(1, M, {1}, Real(0.4)));
    X.data.theta.assign(1, TFPoly(1, M, D));
    X.data.theta[0].add(0, 1, FourierSeries::constant(1, M, d));
    return X;
  }

  TEST_CASE("leading coefficients") {
    const FlowPair K = init_helicoure(field(2, -1, 3));
    CHECK(to_double(K.R.coeff(2)) == doctest::Approx(-0.5));
    CHECK(to_double(average(K.Ky.coeff(2))) == doctest::Approx(-0.25));
    CHECK(to_double(average(K.Ktheta[0].coeff(1))) == doctest::Approx(1.5).epsilon(1e-15));
  }

  TEST_CASE("residual orders") {
    const HelicoureField X = field(2, -1, 3);
    const FlowPair K = solve_helicoure(X, 6);
    const ResidualReport r = helicoure_residual_report(K, X, default_residual_grid(1));
    CHECK(r.slope[0] == doctest::Approx(8).epsilon(0.15 / 8));
    CHECK(r.slope[1] == doctest::Approx(9).epsilon(0.15 / 9));
  }

  TEST_CASE("branch needs the sign of b") {
    CHECK_THROWS(init_helicoure(field(2, 1, 3), Branch::stable));
    CHECK_NOTHROW(init_helicoure(field(2, 1, 3), Branch::unstable));
    CHECK_THROWS_AS(init_helicoure(field(-2, -1, 3)), HypothesisError);
  }
}
