#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ptori/jets.hpp"
#include "ptori/tfpoly.hpp"

using namespace ptori;

namespace {

// u-coefficients of f at fixed theta, in double
std::vector<double> slice(const TFJet& f, const std::vector<double>& th) {
  std::vector<double> c(f.max_order() + 1, 0.0);
  for (int i = 0; i <= f.max_order(); ++i) c[i] = oracle::direct_eval(f.coeff(i), th);
  return c;
}

std::vector<double> conv(const std::vector<double>& a, const std::vector<double>& b, int N) {
  std::vector<double> c(N + 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= std::size_t(N); ++j) c[i + j] += a[i] * b[j];
  return c;
}

TFJet random_jet(std::mt19937_64& rng, int dim, int M, int N, int lo) {
  TFJet f(dim, M, N);
  for (int i = lo; i <= N; ++i) f.set_coeff(i, oracle::random_series(rng, dim, M, 3));
  return f;
}

}  // namespace

TEST_SUITE("jets") {
  TEST_CASE("product matches slice-wise convolution") {
    std::mt19937_64 rng(7);
    const int N = 9;
    const TFJet a = random_jet(rng, 1, 8, N, 1), b = random_jet(rng, 1, 8, N, 2);
    const TFJet p = a * b;
    for (const auto& th : oracle::grid(1, 7)) {
      const auto want = conv(slice(a, th), slice(b, th), N);
      const auto got = slice(p, th);
      for (int i = 0; i <= N; ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12).scale(1));
    }
    CHECK(p.min_order() >= 3);
  }

  TEST_CASE("power agrees with repeated products") {
    std::mt19937_64 rng(8);
    const TFJet a = random_jet(rng, 2, 5, 10, 1);
    const TFJet p3 = jet_pow(a, 3), q = a * a * a;
    for (int i = 0; i <= 10; ++i)
      CHECK(to_double(qabs(average(p3.coeff(i)) - average(q.coeff(i)))) < 1e-13);
  }

  TEST_CASE("compose_inner with a polynomial and an angle shift") {
    std::mt19937_64 rng(9);
    const int N = 8;
    const TFJet f = random_jet(rng, 1, 8, N, 0);
    const UPoly r(std::vector<Real>{0, 1, Real(-0.75), Real(0.2)});
    const std::vector<Real> s{Real(0.3)};
    const TFJet g = compose_inner(f, r, s);
    for (const auto& th : oracle::grid(1, 5)) {
      const auto fc = slice(f, {th[0] + 0.3});
      // Horner in truncated polynomials
      std::vector<double> rc{0, 1, -0.75, 0.2}, acc(N + 1, 0.0);
      for (int i = N; i >= 0; --i) {
        acc = conv(acc, rc, N);
        acc[0] += fc[i];
      }
      const auto got = slice(g, th);
      for (int i = 0; i <= N; ++i) CHECK(got[i] == doctest::Approx(acc[i]).epsilon(1e-12).scale(1));
    }
  }

  TEST_CASE("u-derivative lowers the order") {
    const FourierSeries c = FourierSeries::cosine(1, 4, {1}, 2);
    const TFJet f = TFJet::monomial(1, 4, 6, 4, c);
    const TFJet d = jet_derivative_u(f);
    CHECK(d.min_order() == 3);
    CHECK(to_double(oracle::direct_eval(d.coeff(3), {0.0})) == doctest::Approx(8.0));
  }

  TEST_CASE("evaluation sums the series") {
    TFJet f(1, 4, 5);
    f.set_coeff(2, FourierSeries::constant(1, 4, 3));
    f.set_coeff(5, FourierSeries::cosine(1, 4, {1}, 1));
    const double u = 0.1;
    const double want = 3 * u * u + std::pow(u, 5) * std::cos(2 * M_PI * 0.2);
    CHECK(to_double(f.eval(Real(u), {Real(0.2)})) == doctest::Approx(want).epsilon(1e-15));
  }

  TEST_CASE("polynomial substitution into a jet pair") {
    // x^2 y at (x,y) = (u^2, 2u^3) is 2 u^7
    TFPoly P(1, 4, 6);
    P.add(2, 1, FourierSeries::constant(1, 4, 1));
    const TFJet X = TFJet::monomial(1, 4, 10, 2, FourierSeries::constant(1, 4, 1));
    const TFJet Y = TFJet::monomial(1, 4, 10, 3, FourierSeries::constant(1, 4, 2));
    const TFJet r = substitute(P, X, Y, std::vector<TFJet>{});
    CHECK(r.min_order() == 7);
    CHECK(to_double(average(r.coeff(7))) == doctest::Approx(2.0));
  }
}
