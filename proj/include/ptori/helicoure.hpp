#pragma once

#include <vector>

#include "ptori/map_solver.hpp"
#include "ptori/reduced.hpp"
#include "ptori/residual.hpp"

namespace ptori {

// X(x,y,theta,tau) = (c y + ..., b x y + O(y^2), omega + d y + e20 x^2 + ...)
// data.x = {(0,1): c, ...}, data.y = {(1,1): b, ...}, data.theta[i] = {(0,1): d, (2,0): e20, ...}
struct HelicoureField {
  TaylorFourierData data;
  Frequency freq;

  FourierSeries c() const { return data.x.get(0, 1); }
  FourierSeries b() const { return data.y.get(1, 1); }
  FourierSeries d(int i) const { return data.theta[i].get(0, 1); }
  FourierSeries e20(int i) const { return data.theta[i].get(2, 0); }
};

// Throws StructureViolation, ZeroLeadingCoefficient, NonPositiveLeadingCoefficient.
void validate_helicoure_field(const HelicoureField& X);

// Leading coefficients Y_2 = b/2, K_2^y = Y_2/c, K_1^theta = (d K_2^y + e20)/Y_2 (averages).
// The stable branch needs Y_2 < 0 and the unstable one Y_2 > 0.
FlowPair init_helicoure(const HelicoureField& X, Branch branch = Branch::stable);
FlowPair extend_helicoure(const FlowPair& pair, const HelicoureField& X, StepRecord* record = nullptr);
FlowPair solve_helicoure(const HelicoureField& X, int n_target, Branch branch = Branch::stable,
                         std::vector<StepRecord>* log = nullptr);
ResidualReport helicoure_residual_report(const FlowPair& pair, const HelicoureField& X, const ResidualGrid& grid);

}  // namespace ptori
