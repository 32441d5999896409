// Brute-force reference computations used only by the tests. None of these
// share code paths with the library routines they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "fairalloc/coalition.hpp"
#include "fairalloc/fairdiv.hpp"
#include "fairalloc/instance.hpp"

namespace fairalloc::oracle {

inline double euclid(const ProblemInstance& inst, int a, int b) {
  if (inst.has_matrix()) return inst.matrix()[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)];
  const Location& p = inst.location(a);
  const Location& q = inst.location(b);
  return std::sqrt((p.x - q.x) * (p.x - q.x) + (p.y - q.y) * (p.y - q.y));
}

// Minimum over every visiting order of the members of s.
inline double brute_force_cost(const ProblemInstance& inst, CoalitionMask s) {
  std::vector<int> ids;
  for (int id = 1; id <= static_cast<int>(inst.size()); ++id) {
    if ((s.bits() >> (id - 1)) & 1u) ids.push_back(id);
  }
  if (ids.empty()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  do {
    double len = euclid(inst, 0, ids.front()) + euclid(inst, ids.back(), 0);
    for (std::size_t k = 1; k < ids.size(); ++k) len += euclid(inst, ids[k - 1], ids[k]);
    best = std::min(best, len);
  } while (std::next_permutation(ids.begin(), ids.end()));
  const CostParams& cp = inst.cost_params();
  return cp.fixed_cost_per_tour + cp.cost_per_distance * best + cp.cost_per_stop * static_cast<double>(ids.size());
}

// Average marginal cost over all n! join orders.
inline std::vector<double> shapley_by_permutations(const std::function<double(CoalitionMask)>& cost,
                                                   std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> sum(n, 0.0);
  double count = 0.0;
  do {
    std::uint32_t bits = 0;
    double prev = cost(CoalitionMask(0));
    for (std::size_t i : order) {
      bits |= 1u << i;
      const double next = cost(CoalitionMask(bits));
      sum[i] += next - prev;
      prev = next;
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : sum) v /= count;
  return sum;
}

// Expected utility of `agent` by enumerating every joint outcome of the
// mechanism (one winner per liked item, each with probability 1/#likers).
inline double enumerated_expected_utility(const fairdiv::LikeProfile& profile, std::size_t agent) {
  const std::size_t m = profile.items();
  std::vector<std::vector<int>> likers(m);
  for (std::size_t t = 0; t < m; ++t) likers[t] = profile.likers(t);
  double expected = 0.0;
  std::function<void(std::size_t, double, int)> walk = [&](std::size_t t, double prob, int utility) {
    if (t == m) {
      expected += prob * utility;
      return;
    }
    if (likers[t].empty()) {
      walk(t + 1, prob, utility);
      return;
    }
    const double p = prob / static_cast<double>(likers[t].size());
    for (int w : likers[t]) {
      const int gain = (static_cast<std::size_t>(w) == agent && profile.utilities().at(agent, t)) ? 1 : 0;
      walk(t + 1, p, utility + gain);
    }
  };
  walk(0, 1.0, 0);
  return expected;
}

}  // namespace fairalloc::oracle
