#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fairalloc/coalition.hpp"
#include "fairalloc/instance.hpp"

namespace fairalloc {

enum class CostMode { kExact, kHeuristic, kFixedOrder };

std::string to_string(CostMode mode);
CostMode parse_cost_mode(const std::string& name);

// Largest customer count for Held-Karp based operations.
inline constexpr std::size_t kExactLimit = 20;
// Largest customer count for any full coalition table.
inline constexpr std::size_t kTableLimit = 24;
// Memory envelope checked before a table (and its DP state) is allocated.
inline constexpr std::size_t kTableMemoryBudget = std::size_t{1} << 31;

// c(S) for every S, indexed by mask bits. Immutable.
class CoalitionCostTable {
 public:
  // Throws ValidationError unless costs has 2^players entries, costs[0] == 0
  // and every entry is finite and nonnegative.
  CoalitionCostTable(std::string instance_digest, CostMode mode, std::size_t players,
                     std::vector<double> costs);

  std::size_t players() const { return players_; }
  CostMode mode() const { return mode_; }
  const std::string& instance_digest() const { return digest_; }
  std::span<const double> costs() const { return costs_; }

  double operator[](CoalitionMask s) const { return costs_[s.bits()]; }
  double grand() const { return costs_.back(); }

 private:
  std::string digest_;
  CostMode mode_;
  std::size_t players_;
  std::vector<double> costs_;
};

// Coalition cost as a callable; must be safe to call concurrently.
using CostFunction = std::function<double(CoalitionMask)>;

CostFunction table_cost_function(const CoalitionCostTable& table);

// Optimal tour cost via Held-Karp over the members of s.
// Throws CapabilityError when the instance has more than kExactLimit customers.
double exact_coalition_cost(const ProblemInstance& inst, CoalitionMask s);

// Nearest neighbour from the depot, then first-improvement 2-opt.
double heuristic_coalition_cost(const ProblemInstance& inst, CoalitionMask s);
// Visiting order (customer ids, depot excluded) behind heuristic_coalition_cost.
std::vector<int> heuristic_tour(const ProblemInstance& inst, CoalitionMask s);

// Members of s visited in the order they appear in `order`, a permutation of 1..n.
double fixed_order_cost(const ProblemInstance& inst, std::span<const int> order, CoalitionMask s);

// Length of the closed tour depot -> ids... -> depot.
double tour_length(const ProblemInstance& inst, std::span<const int> ids);

// Applies the fixed and per-stop terms to a tour length.
double coalition_cost_from_length(const CostParams& params, double length, int stops);

// Every coalition cost. In exact mode one Held-Karp sweep fills the table.
// `order` is used in fixed-order mode; empty means 1..n.
CoalitionCostTable all_coalition_costs(const ProblemInstance& inst, CostMode mode,
                                       std::span<const int> order = {});

// Per-coalition oracle for `mode`; keeps a reference to inst.
CostFunction coalition_cost_function(const ProblemInstance& inst, CostMode mode,
                                     std::vector<int> order = {});

// CSV with header `mask,cost`.
void write_table_csv(std::ostream& out, const CoalitionCostTable& table);

}  // namespace fairalloc
