#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ptori/applications.hpp"
#include "ptori/fourier.hpp"
#include "ptori/helicoure.hpp"
#include "ptori/jets.hpp"
#include "ptori/map_solver.hpp"
#include "ptori/operators.hpp"
#include "ptori/reduced.hpp"
#include "ptori/residual.hpp"

namespace ptori {

using json = nlohmann::ordered_json;

// JSON text with every floating-point number written with 17 significant digits
std::string dump_json(const json& j, int indent = 2);

// Real from a JSON number or a string: decimal (parsed in full precision),
// "golden" = (sqrt 5 - 1)/2, "sqrt(x)", "-sqrt(x)".
Real parse_real(const json& j);
std::vector<Real> parse_real_vector(const json& j);

json to_json(const FourierSeries& f);
// Accepts the full form {"dim","max_mode","modes":[{"k","re","im"}]} or the shorthand
// {"const": a, "cos": [{"k":[..],"amp":b}], "sin": [...]}, or a plain number (constant).
FourierSeries fourier_from_json(const json& j, int dim, int max_mode);
FourierSeries fourier_from_json(const json& j);

json to_json(const TFJet& f);
TFJet tfjet_from_json(const json& j);

json to_json(const UPoly& p);
UPoly upoly_from_json(const json& j);

// [{"l","m","series"}]
json to_json(const TFPoly& p);
TFPoly tfpoly_from_json(const json& j, int dim, int max_mode, int max_degree);

json to_json(const ManifoldPair& pair);
ManifoldPair pair_from_json(const json& j);

json to_json(const ResidualReport& r);
// columns u, res_x, res_y, res_theta
std::string residual_csv(const ResidualReport& r);

json to_json(const StepRecord& r);
json to_json(const SectorReport& r);
json to_json(const ContractionReport& r);
json to_json(const CoefficientCheck& c);

// Coefficient-wise difference of two pairs.
struct ComponentDiff {
  std::string name;
  int lowest_order = -1;  // -1 when the components agree up to the common truncation
  double max_abs_diff = 0;
  // relation of the lowest-order coefficient averages: "equal", "opposite", "different", "absent"
  std::string leading_relation;
};
struct CompareReport {
  std::vector<ComponentDiff> components;  // Kx, Ky, Ktheta[i]..., R
  bool identical = true;
};
// orders where |a - b| > rel_tol * max(1, |a|, |b|) on some Fourier coefficient count as different
CompareReport compare_pairs(const ManifoldPair& a, const ManifoldPair& b, double rel_tol = 1e-14);
json to_json(const CompareReport& r);

}  // namespace ptori
