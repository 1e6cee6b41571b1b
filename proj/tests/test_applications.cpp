#include <cmath>

#include "doctest.h"
#include "ptori/applications.hpp"
#include "ptori/flow_solver.hpp"

using namespace ptori;

TEST_SUITE("applications") {
  TEST_CASE("oscillator field has the reduced shape") {
    const OscillatorParams p = default_oscillator(8);
    const ReducedField X = build_oscillator_field(p);
    CHECK(X.k == 2);
    CHECK(X.freq.d() == 0);
    CHECK(X.freq.dprime() == 1);
  }

  TEST_CASE("oscillator manifolds") {
    const OscillatorParams p = default_oscillator(8);
    const ReducedField X = build_oscillator_field(p);
    const FlowPair s = oscillator_manifold(p, Branch::stable, 6);
    const FlowPair u = oscillator_manifold(p, Branch::unstable, 6);
    const ResidualReport r = flow_residual_report(s, X, default_residual_grid(1));
    CHECK(r.slope[0] == doctest::Approx(8).epsilon(0.15 / 8));
    CHECK(r.slope[1] == doctest::Approx(9).epsilon(0.15 / 9));
    CHECK(to_double(s.R.coeff(2)) < 0);
    CHECK(to_double(u.R.coeff(2)) > 0);
    // unstable pair against the original field
    const ResidualReport ru = flow_residual_report(u, X, default_residual_grid(1));
    CHECK(ru.slope[0] == doctest::Approx(8).epsilon(0.15 / 8));
  }

  TEST_CASE("time reversal is an involution on the data") {
    const OscillatorParams p = default_oscillator(8);
    const ReducedField X = build_oscillator_field(p);
    const ReducedField Z = time_reverse_field(time_reverse_field(X));
    const std::vector<Real> th{Real(0.37)};
    for (const auto& [e, s] : X.data.y.terms())
      CHECK(to_double(Z.data.y.get(e.first, e.second).eval(th)) == doctest::Approx(to_double(s.eval(th))));
  }

  TEST_CASE("He-Cu leading coefficients") {
    const HeCuParams P = default_hecu(8);
    const HeCuResult r = hecu_manifolds(P, 5);
    const double D = to_double(P.D), a = to_double(P.alpha_morse), m = to_double(P.m), h = to_double(P.h);
    CHECK(to_double(average(r.stable.Ky.coeff(2))) == doctest::Approx(-1 / (4 * m * D)).epsilon(1e-12));
    CHECK(to_double(r.stable.R.coeff(2)) == doctest::Approx(-a / (2 * m)).epsilon(1e-12));
    CHECK(to_double(r.unstable.R.coeff(2)) == doctest::Approx(a / (2 * m)).epsilon(1e-12));
    CHECK(to_double(r.field.omega) == doctest::Approx(std::sqrt(2 * (h - D) / m)).epsilon(1e-12));
    // the angle coefficient at order u vanishes for the honest expansion
    CHECK(std::fabs(to_double(average(r.stable.Ktheta[0].coeff(1)))) < 1e-12);
    CHECK(std::fabs(r.k1_predicted) < 1e-12);
  }

  TEST_CASE("He-Cu residual against the physical field") {
    const HeCuResult r = hecu_manifolds(default_hecu(8), 5);
    CHECK(r.stable_residual.slope[0] == doctest::Approx(7).epsilon(0.15 / 7));
    CHECK(r.stable_residual.slope[1] == doctest::Approx(8).epsilon(0.15 / 8));
    CHECK(r.unstable_residual.slope[0] == doctest::Approx(7).epsilon(0.15 / 7));
  }
}
