#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairalloc/coalition.hpp"

namespace fairalloc {

// Location ids are contiguous: 0 is the depot, 1..n are the customers.
struct Location {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

struct Customer {
  int id = 0;
  Location location;
  double demand_weight = 1.0;  // kg
  double demand_volume = 1.0;  // m^3
  std::optional<std::string> chain;
};

struct CostParams {
  double fixed_cost_per_tour = 0.0;
  double cost_per_distance = 1.0;
  double cost_per_stop = 0.0;

  bool pure_distance() const { return fixed_cost_per_tour == 0.0 && cost_per_stop == 0.0; }
};

// Immutable routing-game instance. Customer i (id i) occupies bit i-1 of a
// CoalitionMask; groups are stored as customer ids.
class ProblemInstance {
 public:
  // Validates every invariant; throws ValidationError naming the field.
  // `matrix`, when non-empty, is (n+1)x(n+1) indexed by location id and
  // overrides coordinates for distances.
  ProblemInstance(Location depot, std::vector<Customer> customers, CostParams cost,
                  std::vector<std::vector<double>> matrix = {},
                  std::vector<std::vector<int>> groups = {});

  std::size_t size() const { return customers_.size(); }
  const Location& depot() const { return depot_; }
  const std::vector<Customer>& customers() const { return customers_; }
  const Customer& customer(int id) const;
  const CostParams& cost_params() const { return cost_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }
  bool has_matrix() const { return !matrix_.empty(); }
  const std::vector<std::vector<double>>& matrix() const { return matrix_; }

  // Distance between location ids a and b (0 = depot).
  double distance(int a, int b) const;
  const Location& location(int id) const;

  // Masks over the customers of each group.
  std::vector<CoalitionMask> group_masks() const;
  bool group_feasible(CoalitionMask mask) const;

  // Stable content hash (FNV-1a over the canonical JSON form), hex encoded.
  std::string digest() const;

 private:
  Location depot_;
  std::vector<Customer> customers_;
  CostParams cost_;
  std::vector<std::vector<double>> matrix_;
  std::vector<std::vector<int>> groups_;
  std::vector<double> dist_;  // dense (n+1)^2 cache
};

// JSON ingestion and emission. See README for the schema.
ProblemInstance load_instance(std::string_view document);
ProblemInstance load_instance_file(const std::string& path);
std::string to_json(const ProblemInstance& inst);

// Generators. All are pure functions of their arguments.
ProblemInstance generate_random_euclidean(std::size_t n, std::uint64_t seed, double box = 100.0);
ProblemInstance generate_outback_pair(double far_distance);

enum class PathologyDirection { kUnderestimate, kOverestimate };

struct PathologyParams {
  double far_distance = 100.0;
  double near_distance = 10.0;
};

// Families on which the depot-distance proxy degrades without bound as n grows.
//
// Underestimate: customer 1 sits alone at far_distance east of the depot;
// customers 2..n share one point at near_distance to the west. The isolated
// customer pays 2*far_distance under Shapley but its proxy share shrinks
// like 1/n.
//
// Overestimate: customer 1 sits at far_distance east; customers 2..n share a
// point on the way, at near_distance/(n-1) from the depot. The cluster
// rides along on customer 1's tour, so each member's Shapley share is
// 2*near_distance/(n*(n-1)) while the proxy gives it a fixed fraction of
// the proxy mass divided n-1 ways.
ProblemInstance generate_depot_proxy_pathology(std::size_t n, PathologyDirection direction,
                                               PathologyParams params = {});

}  // namespace fairalloc
