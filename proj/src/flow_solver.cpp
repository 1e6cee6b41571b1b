#include "ptori/flow_solver.hpp"

#include "ptori/errors.hpp"

namespace ptori {

namespace {

detail::LeadingData leading(const ReducedField& X) {
  detail::LeadingData L;
  L.setting = Setting::flow;
  L.data = &X.data;
  L.k = X.k;
  L.p = X.p;
  L.freq = X.freq;
  return L;
}

}  // namespace

FlowPair init_order2_flow(const ReducedField& X, Branch branch) {
  validate_reduced_field(X, true);
  return detail::init_pair(leading(X), branch);
}

FlowPair extend_order_flow(const FlowPair& pair, const ReducedField& X, StepRecord* record) {
  if (pair.setting != Setting::flow || pair.helicoure)
    throw DimensionMismatch("extend_order_flow: pair was not produced by the flow solver");
  return detail::extend_pair(pair, leading(X), record);
}

FlowPair solve_flow_to_order(const ReducedField& X, Branch branch, int n_target, std::vector<StepRecord>* log) {
  if (n_target < 2) throw ConfigError("target order must be at least 2");
  FlowPair pair = init_order2_flow(X, branch);
  while (pair.n < n_target) {
    StepRecord rec;
    pair = extend_order_flow(pair, X, &rec);
    if (log) log->push_back(rec);
  }
  return pair;
}

ResidualReport flow_residual_report(const FlowPair& pair, const ReducedField& X, const ResidualGrid& grid) {
  return flow_residual_report(pair, X.data, grid);
}

}  // namespace ptori
