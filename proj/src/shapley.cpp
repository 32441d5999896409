#include "fairalloc/shapley.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

#include <fmt/format.h>

#include "fairalloc/error.hpp"
#include "fairalloc/rng.hpp"

namespace fairalloc {

double AllocationVector::total() const { return std::accumulate(shares.begin(), shares.end(), 0.0); }

std::vector<double> shapley_from_costs(std::span<const double> costs, std::size_t players) {
  if (players == 0) throw ValidationError("shapley: need at least one player");
  if (players > kTableLimit) {
    throw CapabilityError(fmt::format("shapley: limited to {} players", kTableLimit));
  }
  const std::size_t states = std::size_t{1} << players;
  if (costs.size() != states) {
    throw ValidationError(fmt::format("shapley: incomplete table ({} of {} entries)", costs.size(), states));
  }
  // weight[k] = k! (n-k-1)! / n!, built as a running ratio so no factorial
  // is ever formed.
  std::vector<double> weight(players);
  weight[0] = 1.0 / static_cast<double>(players);
  for (std::size_t k = 1; k < players; ++k) {
    weight[k] = weight[k - 1] * static_cast<double>(k) / static_cast<double>(players - k);
  }

  std::vector<double> phi(players, 0.0);
  for (std::size_t s = 0; s + 1 < states; ++s) {
    const double w = weight[static_cast<std::size_t>(std::popcount(s))];
    for (std::size_t i = 0; i < players; ++i) {
      const std::size_t bit = std::size_t{1} << i;
      if (s & bit) continue;
      phi[i] += w * (costs[s | bit] - costs[s]);
    }
  }
  return phi;
}

AllocationVector shapley_exact(const CoalitionCostTable& table) {
  return {shapley_from_costs(table.costs(), table.players()), "shapley-exact"};
}

namespace {

// Marginal costs of `count` consecutive samples starting at `first`, laid
// out sample-major. Samples in one block share a substream.
void sample_block(const CostFunction& cost, std::size_t players, std::uint64_t seed,
                  std::size_t block, std::size_t count, std::vector<double>& out) {
  Rng rng = make_substream(seed, block);
  out.assign(count * players, 0.0);
  std::vector<std::size_t> order(players);
  const double empty_cost = cost(CoalitionMask::empty());
  for (std::size_t s = 0; s < count; ++s) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    shuffle(std::span<std::size_t>(order), rng);
    CoalitionMask prefix;
    double prev = empty_cost;
    double* row = out.data() + s * players;
    for (std::size_t i : order) {
      prefix = prefix.with_index(i);
      const double next = cost(prefix);
      row[i] = next - prev;
      prev = next;
    }
  }
}

std::vector<std::size_t> normalized_checkpoints(std::vector<std::size_t> checkpoints, std::size_t samples) {
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  for (std::size_t c : checkpoints) {
    if (c < 1 || c > samples) {
      throw ValidationError(fmt::format("checkpoints: {} outside [1, {}]", c, samples));
    }
  }
  return checkpoints;
}

}  // namespace

MonteCarloResult shapley_monte_carlo(const CostFunction& cost, std::size_t players,
                                     const MonteCarloOptions& options, const AllocationVector* exact) {
  if (options.samples == 0) throw ValidationError("samples: must be at least 1");
  if (players == 0) throw ValidationError("players: must be at least 1");
  if (players > 32) throw CapabilityError("monte carlo: limited to 32 players");
  if (exact != nullptr && exact->size() != players) {
    throw ValidationError(fmt::format("exact reference has {} shares, expected {}", exact->size(), players));
  }
  std::vector<std::size_t> checkpoints = normalized_checkpoints(options.checkpoints, options.samples);
  if (exact != nullptr && checkpoints.empty()) checkpoints.push_back(options.samples);

  const std::size_t blocks = (options.samples + kSamplesPerBlock - 1) / kSamplesPerBlock;
  const std::size_t threads = std::clamp<std::size_t>(options.threads, 1, blocks);
  auto block_size = [&](std::size_t b) {
    return std::min(kSamplesPerBlock, options.samples - b * kSamplesPerBlock);
  };

  MonteCarloResult result;
  std::vector<double> sum(players, 0.0);
  std::size_t done = 0;
  auto next_checkpoint = checkpoints.begin();
  auto estimate_at = [&](std::size_t n_samples) {
    AllocationVector est{std::vector<double>(players), "shapley-mc"};
    for (std::size_t i = 0; i < players; ++i) est.shares[i] = sum[i] / static_cast<double>(n_samples);
    return est;
  };

  // Blocks are computed in waves (possibly in parallel) but always folded
  // into the running sum in sample order.
  std::vector<std::vector<double>> buffers(threads);
  for (std::size_t first = 0; first < blocks; first += threads) {
    const std::size_t wave = std::min(threads, blocks - first);
    if (wave == 1) {
      sample_block(cost, players, options.seed, first, block_size(first), buffers[0]);
    } else {
      std::vector<std::exception_ptr> failures(wave);
      {
        std::vector<std::jthread> workers;
        workers.reserve(wave);
        for (std::size_t t = 0; t < wave; ++t) {
          workers.emplace_back([&, t] {
            try {
              sample_block(cost, players, options.seed, first + t, block_size(first + t), buffers[t]);
            } catch (...) {
              failures[t] = std::current_exception();
            }
          });
        }
      }
      for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
    }
    for (std::size_t t = 0; t < wave; ++t) {
      const std::size_t count = block_size(first + t);
      for (std::size_t s = 0; s < count; ++s) {
        const double* row = buffers[t].data() + s * players;
        for (std::size_t i = 0; i < players; ++i) sum[i] += row[i];
        ++done;
        if (next_checkpoint != checkpoints.end() && *next_checkpoint == done) {
          if (exact != nullptr) {
            const PercentError err = convergence_error(estimate_at(done), *exact);
            result.trace.checkpoints.push_back({done, err.mape, err.max_pct});
            result.trace.excluded = err.excluded;
          }
          ++next_checkpoint;
        }
      }
    }
  }
  result.estimate = estimate_at(options.samples);
  return result;
}

AllocationVector marginal_cost_vector(const CoalitionCostTable& table) {
  const std::size_t n = table.players();
  const CoalitionMask grand = CoalitionMask::grand(n);
  AllocationVector out{std::vector<double>(n), "marginal"};
  for (std::size_t i = 0; i < n; ++i) out.shares[i] = table[grand] - table[grand.without_index(i)];
  return out;
}

AllocationVector group_constrained_shapley(const CostFunction& cost, std::size_t customers,
                                           const std::vector<std::vector<int>>& groups,
                                           std::span<const double> weights) {
  if (weights.size() != customers) {
    throw ValidationError(fmt::format("weights: expected {} entries, got {}", customers, weights.size()));
  }
  // Players in order of their lowest customer id.
  std::vector<int> group_of(customers + 1, -1);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (int id : groups[g]) {
      if (id < 1 || id > static_cast<int>(customers)) {
        throw ValidationError(fmt::format("groups[{}]: unknown customer id {}", g, id));
      }
      if (group_of[static_cast<std::size_t>(id)] != -1) {
        throw ValidationError(fmt::format("groups[{}]: customer {} belongs to several groups", g, id));
      }
      group_of[static_cast<std::size_t>(id)] = static_cast<int>(g);
    }
  }
  std::vector<std::vector<int>> players;
  std::vector<bool> placed(groups.size(), false);
  for (int id = 1; id <= static_cast<int>(customers); ++id) {
    const int g = group_of[static_cast<std::size_t>(id)];
    if (g < 0) {
      players.push_back({id});
    } else if (!placed[static_cast<std::size_t>(g)]) {
      placed[static_cast<std::size_t>(g)] = true;
      players.push_back(groups[static_cast<std::size_t>(g)]);
    }
  }

  const std::size_t m = players.size();
  if (m > kTableLimit) throw CapabilityError(fmt::format("grouped game limited to {} players", kTableLimit));
  std::vector<CoalitionMask> player_mask(m);
  for (std::size_t p = 0; p < m; ++p) player_mask[p] = CoalitionMask::of_ids(players[p]);

  std::vector<double> player_costs(std::size_t{1} << m, 0.0);
  for (std::size_t s = 1; s < player_costs.size(); ++s) {
    CoalitionMask members;
    for (std::size_t p = 0; p < m; ++p) {
      if ((s >> p) & 1u) members = members | player_mask[p];
    }
    player_costs[s] = cost(members);
  }
  const std::vector<double> player_share = shapley_from_costs(player_costs, m);

  AllocationVector out{std::vector<double>(customers, 0.0), groups.empty() ? "shapley-exact" : "shapley-grouped"};
  for (std::size_t p = 0; p < m; ++p) {
    double weight_sum = 0.0;
    for (int id : players[p]) weight_sum += weights[static_cast<std::size_t>(id - 1)];
    for (int id : players[p]) {
      const double fraction = weight_sum > 0.0 ? weights[static_cast<std::size_t>(id - 1)] / weight_sum
                                               : 1.0 / static_cast<double>(players[p].size());
      out.shares[static_cast<std::size_t>(id - 1)] = player_share[p] * fraction;
    }
  }
  return out;
}

AllocationVector group_constrained_shapley(const CoalitionCostTable& table,
                                           const std::vector<std::vector<int>>& groups,
                                           std::span<const double> weights) {
  return group_constrained_shapley(table_cost_function(table), table.players(), groups, weights);
}

PercentError convergence_error(const AllocationVector& estimate, const AllocationVector& exact) {
  if (estimate.size() != exact.size()) {
    throw ValidationError(fmt::format("dimension mismatch: {} estimated shares vs {} exact",
                                      estimate.size(), exact.size()));
  }
  PercentError err;
  std::size_t counted = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    if (exact.shares[i] == 0.0) {
      err.excluded.push_back(static_cast<int>(i) + 1);
      continue;
    }
    const double pct = std::abs(estimate.shares[i] - exact.shares[i]) / std::abs(exact.shares[i]) * 100.0;
    total += pct;
    err.max_pct = std::max(err.max_pct, pct);
    ++counted;
  }
  if (counted > 0) err.mape = total / static_cast<double>(counted);
  return err;
}

void write_allocation_csv(std::ostream& out, const AllocationVector& allocation) {
  out << "customer_id,share,method\n";
  for (std::size_t i = 0; i < allocation.size(); ++i) {
    out << fmt::format("{},{},{}\n", i + 1, allocation.shares[i], allocation.method);
  }
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace) {
  out << "samples,mape,max_pct\n";
  for (const auto& c : trace.checkpoints) out << fmt::format("{},{},{}\n", c.samples, c.mape, c.max_pct);
}

}  // namespace fairalloc
