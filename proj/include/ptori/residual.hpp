#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "ptori/fourier.hpp"
#include "ptori/jets.hpp"
#include "ptori/reduced.hpp"
#include "ptori/upoly.hpp"

namespace ptori {

enum class Branch { stable, unstable };

std::string to_string(Branch b);
Branch parse_branch(const std::string& s);

// (K, R) for maps or (K, Y) for vector fields.
// K^x = u^2 + ..., K^y = Kbar u^{k+1} + ..., K^theta tail = Kbar u^{2p-k+1} + ...
// For the helicoure case K^x = u + ..., K^y = K_2 u^2 + ..., K^theta tail = K_1 u + ...
struct ManifoldPair {
  Setting setting = Setting::map;
  bool helicoure = false;
  TFJet Kx;
  TFJet Ky;
  std::vector<TFJet> Ktheta;
  UPoly R;  // R^x(u) for maps, Y^x(u) for fields
  Frequency freq;
  Branch branch = Branch::stable;
  int n = 0;
  int k = 2;
  int p = 1;
};
using FlowPair = ManifoldPair;

// orders of the invariance defect for the pair at its current n
std::array<int, 3> expected_orders(const ManifoldPair& pair);

struct ResidualReport {
  std::vector<Real> u;
  // sup over the theta grid, per u
  std::vector<Real> res_x;
  std::vector<Real> res_y;
  std::vector<Real> res_theta;  // max over angle components; 0 when there are none
  std::array<double, 3> slope{0, 0, 0};
  std::array<int, 3> expected{0, 0, 0};
  double fit_lo = 1e-3;
  double fit_hi = 1e-2;
};

// log-spaced points on [lo, hi]
std::vector<Real> log_grid(double lo, double hi, int n);
// uniform grid of per_axis^dim points in [0,1)^dim
std::vector<std::vector<Real>> theta_grid(int dim, int per_axis);
// least-squares slope of log r against log u over u in [lo, hi]; NaN when fewer than two usable points
double fit_slope(const std::vector<Real>& u, const std::vector<Real>& r, double lo, double hi);

// Invariance defects as jets, truncated at N.
// maps: F o K - K o R; fields: X o K - dK/du Y - dK/dtheta omega - dK/dtau nu
SubstitutedComponents map_residual_jets(const ManifoldPair& pair, const TaylorFourierData& F, int N);
SubstitutedComponents field_residual_jets(const ManifoldPair& pair, const TaylorFourierData& X, int N);

// Pointwise invariance defects (x, y, max over angle tails), quad precision.
std::array<Real, 3> map_residual_at(const ManifoldPair& pair, const TaylorFourierData& F, Real u,
                                    const std::vector<Real>& theta);
std::array<Real, 3> field_residual_at(const ManifoldPair& pair, const TaylorFourierData& X, Real u,
                                      const std::vector<Real>& theta);
// F^{-1} o K - K o R^{-1}, with R^{-1} the reversion of pair.R truncated at order N
std::array<Real, 3> inverse_residual_at(const ManifoldPair& pair, const MapInverse& Fi, const UPoly& Rinv, Real u,
                                        const std::vector<Real>& theta);

struct ResidualGrid {
  std::vector<Real> u;
  std::vector<std::vector<Real>> theta;
  double fit_lo = 1e-3;
  double fit_hi = 1e-2;
};
// default grid: 12 log-spaced u in [1e-3, 1e-2] and a uniform theta grid
ResidualGrid default_residual_grid(int torus_dim);

ResidualReport residual_report(const ManifoldPair& pair, const ReducedMap& F, const ResidualGrid& grid);
ResidualReport flow_residual_report(const ManifoldPair& pair, const TaylorFourierData& X, const ResidualGrid& grid);
// Field given pointwise: returns (x', y', angle rates minus omega) at (x, y, angles).
using FieldRates = std::function<Point3(Real x, Real y, const std::vector<Real>& angles)>;
ResidualReport field_residual_report(const ManifoldPair& pair, const FieldRates& X, const ResidualGrid& grid);

ResidualReport inverse_residual_report(const ManifoldPair& pair, const ReducedMap& F, const ResidualGrid& grid);

}  // namespace ptori
