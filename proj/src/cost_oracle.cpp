#include "fairalloc/cost_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "fairalloc/error.hpp"

namespace fairalloc {

std::string to_string(CostMode mode) {
  switch (mode) {
    case CostMode::kExact: return "exact";
    case CostMode::kHeuristic: return "heuristic";
    case CostMode::kFixedOrder: return "fixed_order";
  }
  return "unknown";
}

CostMode parse_cost_mode(const std::string& name) {
  if (name == "exact") return CostMode::kExact;
  if (name == "heuristic") return CostMode::kHeuristic;
  if (name == "fixed_order" || name == "fixed-order") return CostMode::kFixedOrder;
  throw ValidationError("mode: unknown cost mode '" + name + "'");
}

CoalitionCostTable::CoalitionCostTable(std::string instance_digest, CostMode mode,
                                       std::size_t players, std::vector<double> costs)
    : digest_(std::move(instance_digest)), mode_(mode), players_(players), costs_(std::move(costs)) {
  if (players_ > kTableLimit) {
    throw CapabilityError(fmt::format("coalition table limited to {} players", kTableLimit));
  }
  if (costs_.size() != (std::size_t{1} << players_)) {
    throw ValidationError(fmt::format("coalition table incomplete: {} entries for {} players",
                                      costs_.size(), players_));
  }
  if (costs_[0] != 0.0) throw ValidationError("coalition table: cost of the empty coalition must be 0");
  for (std::size_t m = 0; m < costs_.size(); ++m) {
    if (!std::isfinite(costs_[m]) || costs_[m] < 0.0) {
      throw ValidationError(fmt::format("coalition table: entry {} is not finite and >= 0", m));
    }
  }
}

CostFunction table_cost_function(const CoalitionCostTable& table) {
  return [&table](CoalitionMask s) { return table[s]; };
}

namespace {

void check_mask(const ProblemInstance& inst, CoalitionMask s) {
  if (inst.size() < 32 && !s.subset_of(CoalitionMask::grand(inst.size()))) {
    throw ValidationError(fmt::format("mask {:#x} has bits beyond customer {}", s.bits(), inst.size()));
  }
}

void check_exact_limit(const ProblemInstance& inst) {
  if (inst.size() > kExactLimit) {
    throw CapabilityError(fmt::format(
        "exact mode is limited to n <= {} customers (instance has {}); use heuristic mode",
        kExactLimit, inst.size()));
  }
}

// Held-Karp over `members`: best[mask * k + j] is the shortest depot path that
// visits exactly the members in mask and ends at members[j].
std::vector<double> held_karp(const ProblemInstance& inst, const std::vector<int>& members) {
  const std::size_t k = members.size();
  const std::size_t states = std::size_t{1} << k;
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> best(states * k, kInf);
  for (std::size_t j = 0; j < k; ++j) best[(std::size_t{1} << j) * k + j] = inst.distance(0, members[j]);
  for (std::size_t mask = 1; mask < states; ++mask) {
    if (std::has_single_bit(mask)) continue;
    for (std::size_t j = 0; j < k; ++j) {
      if (!((mask >> j) & 1u)) continue;
      const std::size_t prev = mask & ~(std::size_t{1} << j);
      double value = kInf;
      for (std::size_t i = 0; i < k; ++i) {
        if (!((prev >> i) & 1u)) continue;
        value = std::min(value, best[prev * k + i] + inst.distance(members[i], members[j]));
      }
      best[mask * k + j] = value;
    }
  }
  return best;
}

double close_tour(const ProblemInstance& inst, const std::vector<double>& best,
                  const std::vector<int>& members, std::size_t mask) {
  const std::size_t k = members.size();
  double value = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < k; ++j) {
    if ((mask >> j) & 1u) value = std::min(value, best[mask * k + j] + inst.distance(members[j], 0));
  }
  return value;
}

void check_table_budget(std::size_t n, std::size_t doubles_per_mask) {
  const std::size_t bytes = (std::size_t{1} << n) * doubles_per_mask * sizeof(double);
  if (bytes > kTableMemoryBudget) {
    throw CapabilityError(fmt::format("coalition table for n = {} needs {} bytes, budget is {}", n,
                                      bytes, kTableMemoryBudget));
  }
}

std::vector<int> identity_order(std::size_t n) {
  std::vector<int> order(n);
  for (std::size_t k = 0; k < n; ++k) order[k] = static_cast<int>(k) + 1;
  return order;
}

void check_order(const ProblemInstance& inst, std::span<const int> order) {
  const std::size_t n = inst.size();
  if (order.size() != n) {
    throw ValidationError(fmt::format("order: expected a permutation of 1..{} ({} entries given)", n,
                                      order.size()));
  }
  std::vector<bool> seen(n + 1, false);
  for (int id : order) {
    if (id < 1 || id > static_cast<int>(n) || seen[static_cast<std::size_t>(id)]) {
      throw ValidationError(fmt::format("order: not a permutation of 1..{} (entry {})", n, id));
    }
    seen[static_cast<std::size_t>(id)] = true;
  }
}

}  // namespace

double coalition_cost_from_length(const CostParams& params, double length, int stops) {
  if (stops == 0) return 0.0;
  return params.fixed_cost_per_tour + params.cost_per_distance * length +
         params.cost_per_stop * static_cast<double>(stops);
}

double tour_length(const ProblemInstance& inst, std::span<const int> ids) {
  double length = 0.0;
  int prev = 0;
  for (int id : ids) {
    length += inst.distance(prev, id);
    prev = id;
  }
  return length + inst.distance(prev, 0);
}

double exact_coalition_cost(const ProblemInstance& inst, CoalitionMask s) {
  check_exact_limit(inst);
  check_mask(inst, s);
  if (s.is_empty()) return 0.0;
  const std::vector<int> members = s.ids();
  const std::vector<double> best = held_karp(inst, members);
  const double length = close_tour(inst, best, members, (std::size_t{1} << members.size()) - 1);
  return coalition_cost_from_length(inst.cost_params(), length, s.count());
}

std::vector<int> heuristic_tour(const ProblemInstance& inst, CoalitionMask s) {
  check_mask(inst, s);
  std::vector<int> remaining = s.ids();
  // Position 0 is the depot throughout; 2-opt never moves it.
  std::vector<int> tour{0};
  tour.reserve(remaining.size() + 1);
  while (!remaining.empty()) {
    const int here = tour.back();
    std::size_t pick = 0;
    for (std::size_t k = 1; k < remaining.size(); ++k) {
      if (inst.distance(here, remaining[k]) < inst.distance(here, remaining[pick])) pick = k;
    }
    tour.push_back(remaining[pick]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  const std::size_t len = tour.size();
  const double eps = 1e-12 * std::max(1.0, tour_length(inst, std::span(tour).subspan(1)));
  bool improved = len >= 4;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i + 2 < len && !improved; ++i) {
      for (std::size_t j = i + 2; j < len && !improved; ++j) {
        if (i == 0 && j == len - 1) continue;  // edges share the depot
        const int a = tour[i], b = tour[i + 1], c = tour[j], e = tour[(j + 1) % len];
        const double delta = inst.distance(a, c) + inst.distance(b, e) - inst.distance(a, b) -
                             inst.distance(c, e);
        if (delta < -eps) {
          std::reverse(tour.begin() + static_cast<std::ptrdiff_t>(i + 1),
                       tour.begin() + static_cast<std::ptrdiff_t>(j + 1));
          improved = true;
        }
      }
    }
  }
  tour.erase(tour.begin());
  return tour;
}

double heuristic_coalition_cost(const ProblemInstance& inst, CoalitionMask s) {
  if (s.is_empty()) {
    check_mask(inst, s);
    return 0.0;
  }
  const std::vector<int> tour = heuristic_tour(inst, s);
  return coalition_cost_from_length(inst.cost_params(), tour_length(inst, tour), s.count());
}

double fixed_order_cost(const ProblemInstance& inst, std::span<const int> order, CoalitionMask s) {
  check_order(inst, order);
  check_mask(inst, s);
  double length = 0.0;
  int prev = 0;
  for (int id : order) {
    if (!s.contains_id(id)) continue;
    length += inst.distance(prev, id);
    prev = id;
  }
  length += inst.distance(prev, 0);
  return coalition_cost_from_length(inst.cost_params(), length, s.count());
}

CoalitionCostTable all_coalition_costs(const ProblemInstance& inst, CostMode mode,
                                       std::span<const int> order) {
  const std::size_t n = inst.size();
  if (mode == CostMode::kExact) {
    check_exact_limit(inst);
  } else if (n > kTableLimit) {
    throw CapabilityError(fmt::format("coalition tables are limited to n <= {} customers (instance has {})",
                                      kTableLimit, n));
  }
  const std::size_t states = std::size_t{1} << n;
  std::vector<double> costs(states, 0.0);

  switch (mode) {
    case CostMode::kExact: {
      check_table_budget(n, n + 1);
      const std::vector<int> members = identity_order(n);
      const std::vector<double> best = held_karp(inst, members);
      for (std::size_t m = 1; m < states; ++m) {
        const int stops = std::popcount(m);
        costs[m] = coalition_cost_from_length(inst.cost_params(), close_tour(inst, best, members, m), stops);
      }
      break;
    }
    case CostMode::kHeuristic: {
      check_table_budget(n, 1);
      for (std::size_t m = 1; m < states; ++m) {
        costs[m] = heuristic_coalition_cost(inst, CoalitionMask(static_cast<std::uint32_t>(m)));
      }
      break;
    }
    case CostMode::kFixedOrder: {
      check_table_budget(n, 1);
      const std::vector<int> ord = order.empty() ? identity_order(n) : std::vector<int>(order.begin(), order.end());
      check_order(inst, ord);
      for (std::size_t m = 1; m < states; ++m) {
        costs[m] = fixed_order_cost(inst, ord, CoalitionMask(static_cast<std::uint32_t>(m)));
      }
      break;
    }
  }
  return CoalitionCostTable(inst.digest(), mode, n, std::move(costs));
}

CostFunction coalition_cost_function(const ProblemInstance& inst, CostMode mode, std::vector<int> order) {
  switch (mode) {
    case CostMode::kExact:
      check_exact_limit(inst);
      return [&inst](CoalitionMask s) { return exact_coalition_cost(inst, s); };
    case CostMode::kHeuristic:
      return [&inst](CoalitionMask s) { return heuristic_coalition_cost(inst, s); };
    case CostMode::kFixedOrder:
      if (order.empty()) order = identity_order(inst.size());
      check_order(inst, order);
      return [&inst, order = std::move(order)](CoalitionMask s) { return fixed_order_cost(inst, order, s); };
  }
  throw ValidationError("mode: unknown cost mode");
}

void write_table_csv(std::ostream& out, const CoalitionCostTable& table) {
  out << "mask,cost\n";
  const auto costs = table.costs();
  for (std::size_t m = 0; m < costs.size(); ++m) out << fmt::format("{},{}\n", m, costs[m]);
}

}  // namespace fairalloc
