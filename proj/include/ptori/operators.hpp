#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "ptori/reduced.hpp"
#include "ptori/residual.hpp"
#include "ptori/upoly.hpp"

// Double-precision diagnostics for the parabolic operators on complex sectors.
namespace ptori {

// S(beta, rho) = { |arg u| < beta/2, 0 < |u| < rho }
struct Sector {
  double beta = 0;
  double rho = 0;
  int k = 2;
};
// throws ConfigError unless 0 < beta < pi/(k-1) and 0 < rho < 1
void validate_sector(const Sector& s);
bool in_sector(const Sector& s, ComplexD u, double slack = 1e-12);

struct MuBound {
  double mu = 0;
  double kappa = 0;  // (k-1) beta / 2
};
// largest admissible mu is (k-1)|lead| cos(kappa); throws ConfigError outside (0, that)
MuBound make_mu_bound(double mu, const Sector& s, double lead);
double mu_limit(const Sector& s, double lead);

// nr x na samples: radii rho (i+1/2)/nr, arguments -beta/2 + beta (j+1/2)/na
std::vector<ComplexD> sector_samples(const Sector& s, int nr = 20, int na = 20);

// |u| / (1 + j mu |u|^{k-1})^{1/(k-1)}
double iterate_bound(double abs_u, long j, double mu, int k);

struct SectorReport {
  long iterations = 0;
  std::size_t samples = 0;
  double min_slack = 0;  // min over samples and j of (bound - |R^j u|) / bound
  bool ok = true;
  // first violation, if any
  ComplexD witness_u{0, 0};
  long witness_j = -1;
  std::string witness_kind;  // "left_sector" or "bound"
};

// Iterates R^x on the samples J times. With throw_on_violation a failure raises
// DiagnosticError("BoundViolated") naming the witness; otherwise it is recorded in the report.
SectorReport sector_iterate_check(const UPoly& R, const Sector& s, const MuBound& mu, long J,
                                  const std::vector<ComplexD>& samples, bool throw_on_violation = true);

using ComplexDefect = std::function<ComplexD(ComplexD u, const std::vector<double>& theta)>;

// Controls the truncation of -sum_j eta o R^j and -int eta o phi_s ds.
struct TailControl {
  int k = 2;
  int order = 1;        // eta = O(u^order); order > k-1 is required
  double eta_norm = 0;  // bound for sup |eta(u,theta)| / |u|^order on the sector
  double mu = 0;
  double tol = 1e-12;   // absolute bound on the neglected tail
  long j_max = 50000000;
  double t_max = 1e12;
  double quad_rel = 1e-13;  // relative tolerance of the adaptive integrator
};

struct InverseValue {
  ComplexD value{0, 0};
  long terms = 0;     // orbit terms summed, or accepted integrator steps
  double horizon = 0;  // J or T
  double tail_bound = 0;
};

// sum_{j >= J} eta_norm |u|^m (1 + j mu |u|^{k-1})^{-m/(k-1)}, bounded by the integral from J-1
double orbit_tail_bound(double abs_u, long J, const TailControl& c);
// smallest J with orbit_tail_bound <= tol/2; throws DiagnosticError("TailNotConverged") past j_max
long orbit_terms_needed(double abs_u, const TailControl& c);
// int_T^inf eta_norm |u|^m (1 + s mu |u|^{k-1})^{-m/(k-1)} ds
double flow_tail_bound(double abs_u, double T, const TailControl& c);
double flow_time_needed(double abs_u, const TailControl& c);

// -sum_{j>=0} eta(R^j(u), theta + j omega)
InverseValue orbit_sum_inverse(const ComplexDefect& eta, const UPoly& R, const std::vector<double>& omega, ComplexD u,
                               const std::vector<double>& theta, const TailControl& c);
// f(R(u), theta + omega) - f(u, theta)
ComplexD apply_shift_operator(const ComplexDefect& f, const UPoly& R, const std::vector<double>& omega, ComplexD u,
                              const std::vector<double>& theta);

// u' = Y(u), angles' = rates (omega followed by nu)
struct FlowDrift {
  UPoly Y;
  std::vector<double> rates;
};

// -int_0^inf eta(phi_s(u), theta + rates s) ds by an adaptive Dormand-Prince integration.
// When sector is given, leaving it raises DiagnosticError("FlowLeftSector").
InverseValue flow_inverse(const ComplexDefect& eta, const FlowDrift& J, ComplexD u, const std::vector<double>& theta,
                          const TailControl& c, const Sector* sector = nullptr);
// Df . (Y(u), rates) by central differences with step h
ComplexD directional_derivative(const ComplexDefect& f, const FlowDrift& J, ComplexD u,
                                const std::vector<double>& theta, double h);

// rho^{k-1} + (k-1)/(mu n) for maps, (k-1)/(mu n) for flows
double inverse_norm_bound(Setting s, const Sector& sec, double mu, int n);

struct ContractionOptions {
  double rho = 0.02;
  double ball_alpha = 0.5;
  int u_nodes = 12;
  int theta_nodes = 0;  // per axis; 0 picks 15, 7, 5 for d = 1, 2, >= 3
  double u_min_fraction = 0.125;
  int iterations = 12;
  double tail_rel_tol = 1e-9;
  double mu_fraction = 0.95;  // mu = mu_fraction (k-1)|R_k|
  int extra_order = 6;        // G_n is expanded to truncation_order(n,k,p) + extra_order
};

struct ContractionReport {
  int n = 0;
  int k = 0;
  int p = 0;
  double rho = 0;
  double u_min = 0;
  double mu = 0;
  double ball_alpha = 0;
  int grid_points = 0;
  long orbit_terms = 0;               // per application of T, summed over grid points
  std::vector<double> delta_norms;    // ||Delta_m||, m = 0..iterations
  std::vector<double> update_norms;   // ||Delta_{m+1} - Delta_m||
  std::vector<double> factors;        // update_norms[m] / update_norms[m-1]
  std::vector<double> residuals;      // weighted invariance residual of Delta_m
  bool in_ball = true;
  bool contracting = true;            // every factor < 1
  bool residual_monotone = true;
  double max_factor = 0;
  std::string note;
};

// Fixed-point iteration Delta <- (S^x)^{-1} N(Delta) on the real slice (0, rho] x T^d.
// Delta_c / u^{w_c} is held on Chebyshev nodes in [u_min, rho] times a uniform angle grid,
// w = (n, n+k-1, n+2p-k-1); the Chebyshev series is extrapolated on (0, u_min).
// Throws DiagnosticError("Diverged") when the factor stays >= 1 over 5 iterations.
ContractionReport contraction_probe(const ReducedMap& F, const ManifoldPair& pair, const ContractionOptions& opt);

}  // namespace ptori
