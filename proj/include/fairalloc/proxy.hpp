#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fairalloc/instance.hpp"
#include "fairalloc/shapley.hpp"

namespace fairalloc {

enum class DemandDimension { kWeight, kVolume, kStops };

DemandDimension parse_demand_dimension(const std::string& name);

// Convex blend weights, normalized to sum 1 at construction.
class ProxyWeights {
 public:
  ProxyWeights(double depot, double demand, double marginal);

  double depot() const { return depot_; }
  double demand() const { return demand_; }
  double marginal() const { return marginal_; }

 private:
  double depot_;
  double demand_;
  double marginal_;
};

// grand_cost split in proportion to each customer's distance from the depot.
AllocationVector depot_distance_proxy(const ProblemInstance& inst, double grand_cost);

AllocationVector demand_share_proxy(const ProblemInstance& inst, double grand_cost, DemandDimension dimension);

// Convex combination of the depot, demand and (renormalized) marginal
// vectors. A marginal vector summing to 0 is replaced by the uniform split.
AllocationVector blended_proxy(const ProblemInstance& inst, double grand_cost, const ProxyWeights& weights,
                               const AllocationVector& marginal,
                               DemandDimension dimension = DemandDimension::kWeight);

struct ProxyEvaluation {
  // proxy_i / exact_i; empty where exact_i == 0.
  std::vector<std::optional<double>> ratios;
  double min_ratio = 0.0;          // min proxy_i / exact_i
  double min_inverse_ratio = 0.0;  // min exact_i / proxy_i over proxy_i != 0
  double mape = 0.0;
  std::vector<int> zero_exact;  // customer ids with exact share 0
};

ProxyEvaluation evaluate_proxy(const AllocationVector& proxy, const AllocationVector& exact);

}  // namespace fairalloc
