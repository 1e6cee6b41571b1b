#pragma once

#include <vector>

#include "ptori/map_solver.hpp"
#include "ptori/reduced.hpp"
#include "ptori/residual.hpp"

namespace ptori {

FlowPair init_order2_flow(const ReducedField& X, Branch branch);
FlowPair extend_order_flow(const FlowPair& pair, const ReducedField& X, StepRecord* record = nullptr);
FlowPair solve_flow_to_order(const ReducedField& X, Branch branch, int n_target,
                             std::vector<StepRecord>* log = nullptr);
ResidualReport flow_residual_report(const FlowPair& pair, const ReducedField& X, const ResidualGrid& grid);

}  // namespace ptori
