#include <gtest/gtest.h>

#include <algorithm>

#include "fairalloc/error.hpp"
#include "fairalloc/proxy.hpp"
#include "oracles.hpp"

namespace fairalloc {
namespace {

ProblemInstance line_instance(std::vector<double> xs, std::vector<double> weights = {},
                              std::vector<double> volumes = {}) {
  std::vector<Customer> cs;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    Customer c{int(k) + 1, {int(k) + 1, xs[k], 0}};
    if (!weights.empty()) c.demand_weight = weights[k];
    if (!volumes.empty()) c.demand_volume = volumes[k];
    cs.push_back(c);
  }
  return ProblemInstance({0, 0, 0}, cs, CostParams{});
}

TEST(DepotProxy, Basics) {
  const ProblemInstance outback = generate_outback_pair(100);
  const AllocationVector p = depot_distance_proxy(outback, 200.0);
  EXPECT_DOUBLE_EQ(p.shares[0], 100.0);
  EXPECT_DOUBLE_EQ(p.shares[1], 100.0);

  const AllocationVector q = depot_distance_proxy(line_instance({10, -30}), 80.0);
  EXPECT_DOUBLE_EQ(q.shares[0], 20.0);
  EXPECT_DOUBLE_EQ(q.shares[1], 60.0);

  EXPECT_THROW(depot_distance_proxy(line_instance({0, 0}), 10.0), ValidationError);
}

TEST(DemandProxy, Dimensions) {
  const ProblemInstance four = line_instance({1, 2, 3, 4});
  EXPECT_EQ(demand_share_proxy(four, 100.0, DemandDimension::kStops).shares,
            (std::vector<double>{25, 25, 25, 25}));

  const ProblemInstance two = line_instance({1, 2}, {1, 3}, {5, 1});
  EXPECT_EQ(demand_share_proxy(two, 80.0, DemandDimension::kWeight).shares, (std::vector<double>{20, 60}));
  EXPECT_NE(demand_share_proxy(two, 80.0, DemandDimension::kVolume).shares,
            demand_share_proxy(two, 80.0, DemandDimension::kWeight).shares);

  EXPECT_THROW(demand_share_proxy(line_instance({1, 2}, {0, 0}), 10.0, DemandDimension::kWeight), ValidationError);
  EXPECT_THROW(parse_demand_dimension("mass"), ValidationError);
}

TEST(BlendedProxy, OneHotAndSymmetric) {
  const ProblemInstance inst = generate_random_euclidean(7, 3);
  const CoalitionCostTable t = all_coalition_costs(inst, CostMode::kExact);
  const AllocationVector marginal = marginal_cost_vector(t);
  const double g = t.grand();
  EXPECT_EQ(blended_proxy(inst, g, {1, 0, 0}, marginal).shares, depot_distance_proxy(inst, g).shares);
  EXPECT_EQ(blended_proxy(inst, g, {0, 1, 0}, marginal).shares,
            demand_share_proxy(inst, g, DemandDimension::kWeight).shares);
  const AllocationVector m = blended_proxy(inst, g, {0, 0, 2}, marginal);
  for (std::size_t i = 0; i < m.size(); ++i) EXPECT_NEAR(m.shares[i], g * marginal.shares[i] / marginal.total(), 1e-9);

  const ProblemInstance outback = generate_outback_pair(100);
  const CoalitionCostTable to = all_coalition_costs(outback, CostMode::kExact);
  const AllocationVector b = blended_proxy(outback, 200.0, {1, 1, 1}, marginal_cost_vector(to));
  EXPECT_NEAR(b.shares[0], 100.0, 1e-12);
  EXPECT_NEAR(b.shares[1], 100.0, 1e-12);

  EXPECT_THROW(ProxyWeights(0, 0, 0), ValidationError);
  EXPECT_THROW(ProxyWeights(-1, 1, 1), ValidationError);
}

TEST(Proxies, EfficientNonnegativeAndAnonymous) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProblemInstance inst = generate_random_euclidean(6, seed);
    const CoalitionCostTable t = all_coalition_costs(inst, CostMode::kExact);
    const AllocationVector marginal = marginal_cost_vector(t);
    const double g = t.grand();
    for (const AllocationVector& a :
         {depot_distance_proxy(inst, g), demand_share_proxy(inst, g, DemandDimension::kStops),
          blended_proxy(inst, g, {0.2, 0.3, 0.5}, marginal)}) {
      EXPECT_NEAR(a.total(), g, 1e-9 * g);
      for (double s : a.shares) EXPECT_GE(s, 0.0);
    }
  }

  // Relabeling customers relabels every proxy share.
  const ProblemInstance inst = generate_random_euclidean(6, 31);
  const double g = 123.0;
  const AllocationVector base = depot_distance_proxy(inst, g);
  std::vector<int> perm{1, 2, 3, 4, 5, 6};
  do {
    std::vector<Customer> cs;
    for (std::size_t k = 0; k < 6; ++k) {
      const Location& l = inst.location(perm[k]);
      cs.push_back(Customer{int(k) + 1, {int(k) + 1, l.x, l.y}});
    }
    const AllocationVector p = depot_distance_proxy(ProblemInstance(inst.depot(), cs, CostParams{}), g);
    for (std::size_t k = 0; k < 6; ++k) ASSERT_NEAR(p.shares[k], base.shares[std::size_t(perm[k] - 1)], 1e-12);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(EvaluateProxy, IdentityAndZeros) {
  const AllocationVector exact{{10, 0, 30}, "shapley-exact"};
  const ProxyEvaluation same = evaluate_proxy(exact, exact);
  EXPECT_EQ(same.mape, 0.0);
  EXPECT_EQ(same.min_ratio, 1.0);
  EXPECT_EQ(same.zero_exact, (std::vector<int>{2}));
  EXPECT_FALSE(same.ratios[1].has_value());
  EXPECT_EQ(*same.ratios[0], 1.0);
  EXPECT_THROW(evaluate_proxy({{1}, "x"}, exact), ValidationError);
}

// Exact Shapley of a pathology member, computed by brute-force permutation
// averaging over brute-force tour costs.
std::vector<double> brute_shapley(const ProblemInstance& inst) {
  const std::size_t n = inst.size();
  std::vector<double> costs(std::size_t{1} << n);
  for (std::size_t m = 0; m < costs.size(); ++m) costs[m] = oracle::brute_force_cost(inst, CoalitionMask(std::uint32_t(m)));
  return oracle::shapley_by_permutations([&](CoalitionMask s) { return costs[s.bits()]; }, n);
}

TEST(Pathology, GeometryMatchesBruteForceAndClosedForm) {
  // Underestimate: Shapley (2R, 2e/(n-1) ...), proxy ratio for customer 1 is (R+e)/(R+(n-1)e).
  // Overestimate: cluster members get 2e/(n(n-1)); their inverse ratio is (R+e)/(nR).
  const double R = 100.0, e = 10.0;
  for (std::size_t n : {2u, 4u, 6u, 8u}) {
    const ProblemInstance under = generate_depot_proxy_pathology(n, PathologyDirection::kUnderestimate);
    const std::vector<double> phi_u = brute_shapley(under);
    const AllocationVector exact_u = shapley_exact(all_coalition_costs(under, CostMode::kExact));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(exact_u.shares[i], phi_u[i], 1e-9);
    EXPECT_NEAR(phi_u[0], 2 * R, 1e-9);
    const ProxyEvaluation ev_u = evaluate_proxy(depot_distance_proxy(under, exact_u.total()), exact_u);
    EXPECT_NEAR(ev_u.min_ratio, (R + e) / (R + double(n - 1) * e), 1e-9);

    const ProblemInstance over = generate_depot_proxy_pathology(n, PathologyDirection::kOverestimate);
    const std::vector<double> phi_o = brute_shapley(over);
    const AllocationVector exact_o = shapley_exact(all_coalition_costs(over, CostMode::kExact));
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(exact_o.shares[i], phi_o[i], 1e-9);
    EXPECT_NEAR(phi_o[1], 2 * e / double(n * (n - 1)), 1e-9);
    const ProxyEvaluation ev_o = evaluate_proxy(depot_distance_proxy(over, exact_o.total()), exact_o);
    EXPECT_NEAR(ev_o.min_inverse_ratio, (R + e) / (double(n) * R), 1e-9);
  }
}

TEST(Pathology, RatiosStrictlyDecrease) {
  double prev_under = 2.0, prev_over = 2.0;
  for (std::size_t n : {4u, 6u, 8u, 10u}) {
    const ProblemInstance under = generate_depot_proxy_pathology(n, PathologyDirection::kUnderestimate);
    const AllocationVector eu = shapley_exact(all_coalition_costs(under, CostMode::kExact));
    const double ru = evaluate_proxy(depot_distance_proxy(under, eu.total()), eu).min_ratio;
    const ProblemInstance over = generate_depot_proxy_pathology(n, PathologyDirection::kOverestimate);
    const AllocationVector eo = shapley_exact(all_coalition_costs(over, CostMode::kExact));
    const double ro = evaluate_proxy(depot_distance_proxy(over, eo.total()), eo).min_inverse_ratio;
    EXPECT_LT(ru, prev_under) << n;
    EXPECT_LT(ro, prev_over) << n;
    prev_under = ru;
    prev_over = ro;
  }
}

}  // namespace
}  // namespace fairalloc
