#pragma once

#include <string>
#include <vector>

#include "ptori/flow_solver.hpp"
#include "ptori/helicoure.hpp"
#include "ptori/reduced.hpp"
#include "ptori/residual.hpp"

namespace ptori {

// x' = y, y' = -2 n c x^{2n-1} + alpha x^2 g(nu t)
struct OscillatorParams {
  Real c = 1;
  int n_pot = 2;
  Real alpha = 6;
  FourierSeries g;  // on T^{d'}
  std::vector<Real> nu;
};

// g = 1 + 0.3 cos(2 pi tau) on T^1, nu = sqrt(2); illustrative only
OscillatorParams default_oscillator(int max_mode = 16);

ReducedField build_oscillator_field(const OscillatorParams& p);
// t -> -t, y -> -y: the stable manifold of this field maps to the unstable one of the original
ReducedField build_oscillator_unstable(const OscillatorParams& p);
OscillatorParams time_reversed(const OscillatorParams& p);

// Time reversal of a reduced field on T^{d+d'}: (x, y, theta, tau) -> (x, -y, theta, -tau), omega -> -omega.
ReducedField time_reverse_field(const ReducedField& X);
// Pair of the reversed field mapped back to the original time direction.
FlowPair pair_from_reversed(const FlowPair& reversed, const Frequency& original);

// stable or unstable manifold of the oscillator; the unstable one goes through time reversal
FlowPair oscillator_manifold(const OscillatorParams& p, Branch branch, int n_target);

// He-Cu scattering on a corrugated surface, in McGehee variables y = -e^{-alpha z}.
// The corrugation period is the length unit of theta.
struct HeCuParams {
  Real D = Real(6.35);
  Real alpha_morse = Real(1.05);
  Real m = 1;
  Real h = Real(12.7);
  FourierSeries g_surface;  // on T^1
};

// g = 0.1 cos(2 pi theta); illustrative only
HeCuParams default_hecu(int max_mode = 16);

// ytilde = y + (1 + g(theta)) y^2 and its inverse y = psi(ytilde, theta)
struct NormalizationRecord {
  TFPoly forward;  // in (p, y): ytilde
  TFPoly inverse;  // in (p, ytilde): y
};

struct HeCuField {
  HelicoureField field;
  NormalizationRecord norm;
  Real c = 0;      // 2 D alpha
  Real b = 0;      // -alpha/m
  Real d = 0;      // y coefficient of the angle equation
  Real e20 = 0;    // p^2 coefficient of the angle equation
  Real omega = 0;  // sqrt(2 (h - D)/m)
  int degree = 0;  // Taylor degree of the expansion
};

HeCuField build_hecu_field(const HeCuParams& p, int degree);

// right-hand side of the physical system in (p, y, theta); theta slot holds dtheta/dt - omega
Point3 hecu_exact_rates(const HeCuParams& p, Real pp, Real y, Real theta);

// (p, y, theta) -> (-p, y, theta) combined with t -> -t
HelicoureField reverse_helicoure(const HelicoureField& X);

struct CoefficientCheck {
  std::string name;
  double computed = 0;
  double expected = 0;
  double rel_error = 0;
  bool pass = false;
};

struct HeCuResult {
  HeCuField field;
  FlowPair stable;    // original variables
  FlowPair unstable;  // original variables
  FlowPair stable_normalized;
  FlowPair unstable_normalized;  // stable pair of the reversed normalized field
  std::vector<CoefficientCheck> checks;
  ResidualReport stable_residual;    // against the unexpanded physical field
  ResidualReport unstable_residual;  // against the unexpanded physical field
  double k1_predicted = 0;           // (d K_2 + e20)/Y_2 from the expanded field
};

// tol is the relative tolerance used for the coefficient checks
HeCuResult hecu_manifolds(const HeCuParams& p, int n_target, double tol = 1e-10);

// pull a pair in normalized variables back to (p, y, theta)
FlowPair hecu_pullback(const FlowPair& pair, const NormalizationRecord& norm);

ResidualReport hecu_exact_residual_report(const FlowPair& pair, const HeCuParams& p, const ResidualGrid& grid);

}  // namespace ptori
