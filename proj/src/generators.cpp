#include <cmath>

#include <fmt/format.h>

#include "fairalloc/error.hpp"
#include "fairalloc/instance.hpp"
#include "fairalloc/rng.hpp"

namespace fairalloc {

ProblemInstance generate_random_euclidean(std::size_t n, std::uint64_t seed, double box) {
  if (n == 0) throw ValidationError("n: must be at least 1");
  if (!(std::isfinite(box) && box > 0.0)) throw ValidationError("box: must be positive");
  Rng rng = make_rng(seed);
  std::vector<Customer> customers;
  customers.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Customer c;
    c.id = static_cast<int>(k) + 1;
    const double x = box * uniform_unit(rng);
    const double y = box * uniform_unit(rng);
    c.location = {c.id, x, y};
    customers.push_back(c);
  }
  return ProblemInstance({0, box / 2.0, box / 2.0}, std::move(customers), CostParams{});
}

ProblemInstance generate_outback_pair(double far_distance) {
  if (!(std::isfinite(far_distance) && far_distance > 0.0)) {
    throw ValidationError("far_distance: must be positive");
  }
  std::vector<Customer> customers(2);
  for (int id = 1; id <= 2; ++id) {
    customers[static_cast<std::size_t>(id - 1)].id = id;
    customers[static_cast<std::size_t>(id - 1)].location = {id, far_distance, 0.0};
  }
  return ProblemInstance({0, 0.0, 0.0}, std::move(customers), CostParams{});
}

ProblemInstance generate_depot_proxy_pathology(std::size_t n, PathologyDirection direction,
                                               PathologyParams params) {
  if (n < 2) throw ValidationError(fmt::format("n: pathology families need n >= 2 (got {})", n));
  if (!(std::isfinite(params.far_distance) && params.far_distance > 0.0)) {
    throw ValidationError("far_distance: must be positive");
  }
  if (!(std::isfinite(params.near_distance) && params.near_distance > 0.0)) {
    throw ValidationError("near_distance: must be positive");
  }
  // Overestimate requires the cluster strictly between depot and customer 1.
  if (direction == PathologyDirection::kOverestimate && params.near_distance >= params.far_distance) {
    throw ValidationError("near_distance: must be below far_distance for the overestimate family");
  }

  const double cluster_x = direction == PathologyDirection::kUnderestimate
                               ? -params.near_distance
                               : params.near_distance / static_cast<double>(n - 1);
  std::vector<Customer> customers(n);
  for (std::size_t k = 0; k < n; ++k) {
    Customer& c = customers[k];
    c.id = static_cast<int>(k) + 1;
    c.location = {c.id, k == 0 ? params.far_distance : cluster_x, 0.0};
  }
  return ProblemInstance({0, 0.0, 0.0}, std::move(customers), CostParams{});
}

}  // namespace fairalloc
