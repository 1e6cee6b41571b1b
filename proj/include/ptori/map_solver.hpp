#pragma once

#include <vector>

#include "ptori/reduced.hpp"
#include "ptori/residual.hpp"

namespace ptori {

// Constant-coefficient system assembled in one induction step.
// Unknowns: Kbar^x_{n+1}, Kbar^y_{n+k}, Kbar^theta_{n+2p-k} (one per angle).
struct StepRecord {
  int n = 0;
  bool degenerate = false;
  std::vector<std::vector<double>> matrix;
  std::vector<double> rhs;  // includes the contribution of r_new
  std::vector<double> solution;
  double r_new = 0;  // coefficient of u^{n+k-1} added to R (or Y)
  std::vector<double> g_avg;  // [G^x]_{n+k}, [G^y]_{n+2k-1}, [G^theta_i]_{n+2p-1}
};

// truncation order used while the pair is at order n
int truncation_order(int n, int k, int p);

ManifoldPair init_order2(const ReducedMap& F, Branch branch);
ManifoldPair extend_order(const ManifoldPair& pair, const ReducedMap& F, StepRecord* record = nullptr);
ManifoldPair solve_to_order(const ReducedMap& F, Branch branch, int n_target,
                            std::vector<StepRecord>* log = nullptr);
// unstable branch; when inverse_report is given it receives the residual of F^{-1} o K - K o R^{-1}
ManifoldPair unstable_pair(const ReducedMap& F, int n_target, ResidualReport* inverse_report = nullptr);

namespace detail {

struct LeadingData {
  Setting setting = Setting::map;
  const TaylorFourierData* data = nullptr;
  int k = 2;
  int p = 1;
  Frequency freq;
};

ManifoldPair init_pair(const LeadingData& L, Branch branch);
ManifoldPair extend_pair(const ManifoldPair& pair, const LeadingData& L, StepRecord* record);
void check_margin(const Frequency& freq, int max_mode, Setting setting);

}  // namespace detail

}  // namespace ptori
