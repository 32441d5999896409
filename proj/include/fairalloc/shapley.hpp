#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fairalloc/cost_oracle.hpp"

namespace fairalloc {

// Per-customer cost shares; shares[k] belongs to customer id k+1.
struct AllocationVector {
  std::vector<double> shares;
  std::string method;

  std::size_t size() const { return shares.size(); }
  double total() const;
};

struct ConvergenceCheckpoint {
  std::size_t samples = 0;
  double mape = 0.0;     // mean absolute percentage error, in percent
  double max_pct = 0.0;  // worst customer, in percent
};

struct ConvergenceTrace {
  std::vector<ConvergenceCheckpoint> checkpoints;
  // Customer ids whose exact share is 0; left out of the percentages.
  std::vector<int> excluded;
};

struct PercentError {
  double mape = 0.0;
  double max_pct = 0.0;
  std::vector<int> excluded;
};

// Exact Shapley value from a complete coalition table.
AllocationVector shapley_exact(const CoalitionCostTable& table);

// Same computation over raw costs indexed by player mask (2^players entries).
std::vector<double> shapley_from_costs(std::span<const double> costs, std::size_t players);

struct MonteCarloOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 1;
  std::vector<std::size_t> checkpoints;  // sorted and deduplicated internally
  std::size_t threads = 1;
};

// Permutations per RNG substream. Sample s uses substream s / kSamplesPerBlock.
inline constexpr std::size_t kSamplesPerBlock = 256;

struct MonteCarloResult {
  AllocationVector estimate;
  ConvergenceTrace trace;  // empty unless an exact reference was given
};

// Permutation-sampling estimate of the Shapley value. Results depend only on
// (cost, players, samples, seed): thread count and checkpoints do not change
// the estimate.
MonteCarloResult shapley_monte_carlo(const CostFunction& cost, std::size_t players,
                                     const MonteCarloOptions& options,
                                     const AllocationVector* exact = nullptr);

// c(N) - c(N \ {i}) per customer.
AllocationVector marginal_cost_vector(const CoalitionCostTable& table);

// Shapley value of the game whose players are the groups (plus every
// ungrouped customer alone), each group's share split across its members in
// proportion to `weights` (equal split when the group's weights sum to 0).
// groups hold customer ids; weights is indexed by customer id - 1.
AllocationVector group_constrained_shapley(const CostFunction& cost, std::size_t customers,
                                           const std::vector<std::vector<int>>& groups,
                                           std::span<const double> weights);
AllocationVector group_constrained_shapley(const CoalitionCostTable& table,
                                           const std::vector<std::vector<int>>& groups,
                                           std::span<const double> weights);

PercentError convergence_error(const AllocationVector& estimate, const AllocationVector& exact);

// `customer_id,share,method`
void write_allocation_csv(std::ostream& out, const AllocationVector& allocation);
// `samples,mape,max_pct`
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace);

}  // namespace fairalloc
