#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "fairalloc/cost_oracle.hpp"
#include "fairalloc/error.hpp"
#include "fairalloc/fairdiv.hpp"
#include "fairalloc/instance.hpp"
#include "fairalloc/proxy.hpp"
#include "fairalloc/shapley.hpp"

namespace fairalloc::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 1;

// Writes to a file, or to the fallback stream when the path is "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path == "-") {
      stream_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw ValidationError("cannot write to '" + path + "'");
    stream_ = file_.get();
  }
  std::ostream& get() { return *stream_; }
  bool is_file() const { return file_ != nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_ = nullptr;
};

std::string header(const std::string& command, const std::string& seed, const std::string& extra = {}) {
  std::string line = fmt::format("# fairalloc {} {} seed={}", kVersion, command, seed);
  if (!extra.empty()) line += " " + extra;
  return line + "\n";
}

struct GenOptions {
  std::string generator;
  std::size_t n = 10;
  std::uint64_t seed = kDefaultSeed;
  double box = 100.0;
  double distance = 100.0;
  double far = 100.0;
  double near = 10.0;
  std::string out = "-";
};

void cmd_gen(const GenOptions& o, std::ostream& out, std::ostream& err) {
  std::optional<ProblemInstance> inst;
  if (o.generator == "random") {
    inst = generate_random_euclidean(o.n, o.seed, o.box);
  } else if (o.generator == "outback") {
    inst = generate_outback_pair(o.distance);
  } else if (o.generator == "pathology-under" || o.generator == "pathology-over") {
    const auto dir = o.generator == "pathology-under" ? PathologyDirection::kUnderestimate
                                                      : PathologyDirection::kOverestimate;
    inst = generate_depot_proxy_pathology(o.n, dir, {o.far, o.near});
  } else {
    throw ValidationError("generator: unknown generator '" + o.generator +
                          "' (expected random, outback, pathology-under, pathology-over)");
  }
  Sink sink(o.out, out);
  sink.get() << to_json(*inst);

  double x0 = inst->depot().x, x1 = x0, y0 = inst->depot().y, y1 = y0;
  for (const Customer& c : inst->customers()) {
    x0 = std::min(x0, c.location.x);
    x1 = std::max(x1, c.location.x);
    y0 = std::min(y0, c.location.y);
    y1 = std::max(y1, c.location.y);
  }
  std::ostream& summary = sink.is_file() ? out : err;
  summary << fmt::format("n={} bbox=[{},{}]x[{},{}] groups={}\n", inst->size(), x0, x1, y0, y1,
                         inst->groups().size());
}

struct AllocateOptions {
  std::string instance;
  std::string method;
  std::string mode = "exact";
  std::size_t samples = 1000;
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 1;
  std::vector<std::size_t> checkpoints;
  bool exact_reference = false;
  std::string trace_out;
  std::vector<double> weights{1.0, 1.0, 1.0};
  std::string dimension = "weight";
  std::string out = "-";
};

std::vector<double> demand_weights(const ProblemInstance& inst) {
  std::vector<double> w;
  for (const Customer& c : inst.customers()) w.push_back(c.demand_weight);
  return w;
}

double grand_cost(const ProblemInstance& inst, CostMode mode) {
  return coalition_cost_function(inst, mode)(CoalitionMask::grand(inst.size()));
}

void cmd_allocate(const AllocateOptions& o, std::ostream& out) {
  const ProblemInstance inst = load_instance_file(o.instance);
  const CostMode mode = parse_cost_mode(o.mode);
  const std::size_t n = inst.size();
  AllocationVector alloc;
  std::optional<ConvergenceTrace> trace;

  if (o.method == "shapley-exact") {
    const CoalitionCostTable table = all_coalition_costs(inst, mode);
    alloc = group_constrained_shapley(table, inst.groups(), demand_weights(inst));
  } else if (o.method == "shapley-mc") {
    if (!o.trace_out.empty() && !o.exact_reference) {
      throw ValidationError("--trace-out requires --exact-reference");
    }
    if (o.exact_reference && o.trace_out.empty()) {
      throw ValidationError("--exact-reference requires --trace-out");
    }
    std::optional<CoalitionCostTable> table;
    CostFunction cost;
    if (mode == CostMode::kExact) {
      table.emplace(all_coalition_costs(inst, mode));
      cost = table_cost_function(*table);
    } else {
      cost = coalition_cost_function(inst, mode);
    }
    std::optional<AllocationVector> exact;
    if (o.exact_reference) {
      exact = table && table->mode() == CostMode::kExact
                  ? shapley_exact(*table)
                  : shapley_exact(all_coalition_costs(inst, CostMode::kExact));
    }
    MonteCarloResult r =
        shapley_monte_carlo(cost, n, {o.samples, o.seed, o.checkpoints, o.threads}, exact ? &*exact : nullptr);
    alloc = std::move(r.estimate);
    if (exact) trace = std::move(r.trace);
  } else if (o.method == "marginal") {
    alloc = marginal_cost_vector(all_coalition_costs(inst, mode));
  } else if (o.method == "depot") {
    alloc = depot_distance_proxy(inst, grand_cost(inst, mode));
  } else if (o.method == "demand") {
    alloc = demand_share_proxy(inst, grand_cost(inst, mode), parse_demand_dimension(o.dimension));
  } else if (o.method == "blend") {
    if (o.weights.size() != 3) throw ValidationError("--weights: expected three values depot,demand,marginal");
    const CoalitionCostTable table = all_coalition_costs(inst, mode);
    alloc = blended_proxy(inst, table.grand(), ProxyWeights(o.weights[0], o.weights[1], o.weights[2]),
                          marginal_cost_vector(table), parse_demand_dimension(o.dimension));
  } else {
    throw ValidationError("method: unknown method '" + o.method +
                          "' (expected shapley-exact, shapley-mc, marginal, depot, demand, blend)");
  }

  const std::string extra = fmt::format("method={} mode={} instance={}", o.method, o.mode, inst.digest());
  Sink sink(o.out, out);
  sink.get() << header("allocate", std::to_string(o.seed), extra);
  write_allocation_csv(sink.get(), alloc);
  if (trace) {
    Sink trace_sink(o.trace_out, out);
    trace_sink.get() << header("allocate", std::to_string(o.seed), extra + " trace");
    write_trace_csv(trace_sink.get(), *trace);
  }
}

struct ConvergenceOptions {
  std::string instance;
  std::size_t samples = 1000;
  std::vector<std::size_t> checkpoints{1, 10, 50, 100, 500, 1000};
  std::uint64_t seed = kDefaultSeed;
  std::size_t threads = 1;
  std::string out = "-";
};

void cmd_convergence(const ConvergenceOptions& o, std::ostream& out) {
  const ProblemInstance inst = load_instance_file(o.instance);
  if (!o.checkpoints.empty() && *std::max_element(o.checkpoints.begin(), o.checkpoints.end()) > o.samples) {
    throw ValidationError(fmt::format("--samples {} is below the largest checkpoint", o.samples));
  }
  const CoalitionCostTable table = all_coalition_costs(inst, CostMode::kExact);
  const AllocationVector exact = shapley_exact(table);
  const MonteCarloResult r = shapley_monte_carlo(table_cost_function(table), inst.size(),
                                                 {o.samples, o.seed, o.checkpoints, o.threads}, &exact);
  Sink sink(o.out, out);
  sink.get() << header("convergence", std::to_string(o.seed), "instance=" + inst.digest());
  if (!r.trace.excluded.empty()) {
    sink.get() << "# zero exact share, excluded: " << fmt::format("{}", fmt::join(r.trace.excluded, " ")) << "\n";
  }
  write_trace_csv(sink.get(), r.trace);
}

struct FairdivOptions {
  std::string profile;
  std::size_t runs = 1;
  std::uint64_t seed = kDefaultSeed;
  std::string runs_out;
  std::string envy_out;
  std::string ex_post_out;
  std::string freq_out;
  bool check_strategyproof = false;
};

void cmd_fairdiv(const FairdivOptions& o, std::ostream& out) {
  using namespace fairdiv;
  const LikeProfile profile = load_profile_file(o.profile);
  if (o.runs == 0) throw ValidationError("--runs: must be at least 1");
  const std::size_t agents = profile.agents();
  const std::size_t items = profile.items();

  std::optional<Sink> runs_sink, ex_post_sink;
  const std::string head = header("fairdiv", std::to_string(o.seed), fmt::format("runs={}", o.runs));
  if (!o.runs_out.empty()) runs_sink.emplace(o.runs_out, out);
  if (!o.ex_post_out.empty()) {
    ex_post_sink.emplace(o.ex_post_out, out);
    ex_post_sink->get() << head << "run,max_envy\n";
  }
  if (runs_sink) runs_sink->get() << head;

  // Run k uses seed + k.
  std::vector<std::vector<std::size_t>> wins(items, std::vector<std::size_t>(agents, 0));
  std::vector<std::size_t> envy_histogram;
  for (std::size_t k = 0; k < o.runs; ++k) {
    const AllocationRecord record = run_like_mechanism(profile, o.seed + k);
    for (std::size_t t = 0; t < items; ++t) {
      if (record.winner[t]) ++wins[t][static_cast<std::size_t>(*record.winner[t])];
    }
    const int max_envy = ex_post_envy(record, profile).max_envy;
    const auto bucket = static_cast<std::size_t>(std::max(0, max_envy));
    if (envy_histogram.size() <= bucket) envy_histogram.resize(bucket + 1, 0);
    ++envy_histogram[bucket];
    if (runs_sink) write_run_csv(runs_sink->get(), k, record, k == 0);
    if (ex_post_sink) ex_post_sink->get() << fmt::format("{},{}\n", k, max_envy);
  }

  const auto probs = expected_allocation(profile);
  if (!o.freq_out.empty()) {
    Sink freq(o.freq_out, out);
    freq.get() << head << "item,agent,empirical,expected\n";
    for (std::size_t t = 0; t < items; ++t) {
      for (std::size_t a = 0; a < agents; ++a) {
        freq.get() << fmt::format("{},{},{},{}\n", t, a, double(wins[t][a]) / double(o.runs), probs[a][t]);
      }
    }
  }
  const auto envy = ex_ante_envy(profile);
  if (!o.envy_out.empty()) {
    Sink sink(o.envy_out, out);
    sink.get() << head;
    write_envy_csv(sink.get(), envy);
  }

  out << fmt::format("agents={} items={} runs={} seed={} sincere={}\n", agents, items, o.runs, o.seed,
                     profile.sincere());
  for (std::size_t t = 0; t < items; ++t) {
    out << fmt::format("item {}:", t);
    for (std::size_t a = 0; a < agents; ++a) {
      if (probs[a][t] > 0.0) {
        out << fmt::format(" agent {} {:.4f} (expected {:.4f})", a, double(wins[t][a]) / double(o.runs), probs[a][t]);
      }
    }
    if (profile.likers(t).empty()) out << " unallocated";
    out << "\n";
  }
  double worst_ex_ante = 0.0;
  for (std::size_t i = 0; i < agents; ++i) {
    for (std::size_t j = 0; j < agents; ++j) {
      if (i != j) worst_ex_ante = std::max(worst_ex_ante, envy[i][j]);
    }
  }
  out << fmt::format("max ex-ante envy: {}\n", worst_ex_ante);
  out << "ex-post max envy distribution:";
  for (std::size_t b = 0; b < envy_histogram.size(); ++b) {
    if (envy_histogram[b] > 0) out << fmt::format(" {}:{}", b, envy_histogram[b]);
  }
  out << "\n";

  if (o.check_strategyproof) {
    bool all_truthful = true;
    for (std::size_t a = 0; a < agents; ++a) {
      const BestResponse br = best_response_search(profile, a);
      all_truthful = all_truthful && br.truthful_optimal;
      out << fmt::format("agent {}: truthful utility {} best {} argmax size {}\n", a, br.truthful_utility,
                         br.best_utility, br.argmax.size());
    }
    out << "truthful optimal: " << (all_truthful ? "true" : "false") << "\n";
  }
}

struct CostTableOptions {
  std::string instance;
  std::string mode = "exact";
  std::vector<int> order;
  std::string out = "-";
};

void cmd_cost_table(const CostTableOptions& o, std::ostream& out) {
  const ProblemInstance inst = load_instance_file(o.instance);
  const CoalitionCostTable table = all_coalition_costs(inst, parse_cost_mode(o.mode), o.order);
  Sink sink(o.out, out);
  sink.get() << header("cost-table", "none", fmt::format("mode={} instance={}", o.mode, inst.digest()));
  write_table_csv(sink.get(), table);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fair cost allocation for routing games and online fair division"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Write a generated instance as JSON");
  gen_cmd->add_option("generator", gen.generator, "random | outback | pathology-under | pathology-over")->required();
  gen_cmd->add_option("--n", gen.n, "Number of customers (random, pathology)");
  gen_cmd->add_option("--seed", gen.seed, "RNG seed (random)");
  gen_cmd->add_option("--box", gen.box, "Square side length (random)");
  gen_cmd->add_option("--distance", gen.distance, "Depot distance of the pair (outback)");
  gen_cmd->add_option("--far", gen.far, "Distance of the isolated customer (pathology)");
  gen_cmd->add_option("--near", gen.near, "Cluster distance scale (pathology)");
  gen_cmd->add_option("-o,--out", gen.out, "Output path, - for stdout");

  AllocateOptions alloc;
  auto* alloc_cmd = app.add_subcommand("allocate", "Allocate the grand coalition cost");
  alloc_cmd->add_option("--instance", alloc.instance, "Instance JSON")->required();
  alloc_cmd->add_option("--method", alloc.method, "shapley-exact | shapley-mc | marginal | depot | demand | blend")
      ->required();
  alloc_cmd->add_option("--mode", alloc.mode, "Coalition costs: exact | heuristic | fixed_order");
  alloc_cmd->add_option("--samples", alloc.samples, "Permutations (shapley-mc)");
  alloc_cmd->add_option("--seed", alloc.seed, "RNG seed (shapley-mc)");
  alloc_cmd->add_option("--threads", alloc.threads, "Worker threads (shapley-mc); output does not depend on it");
  alloc_cmd->add_option("--checkpoints", alloc.checkpoints, "Trace sample counts (shapley-mc)")->delimiter(',');
  alloc_cmd->add_flag("--exact-reference", alloc.exact_reference, "Compare against exact Shapley (shapley-mc)");
  alloc_cmd->add_option("--trace-out", alloc.trace_out, "Trace CSV path (with --exact-reference)");
  alloc_cmd->add_option("--weights", alloc.weights, "Blend weights depot,demand,marginal")->delimiter(',');
  alloc_cmd->add_option("--dimension", alloc.dimension, "Demand dimension: weight | volume | stops");
  alloc_cmd->add_option("-o,--out", alloc.out, "Output path, - for stdout");

  ConvergenceOptions conv;
  auto* conv_cmd = app.add_subcommand("convergence", "Monte Carlo error against exact Shapley");
  conv_cmd->add_option("--instance", conv.instance, "Instance JSON")->required();
  conv_cmd->add_option("--samples", conv.samples, "Permutations");
  conv_cmd->add_option("--checkpoints", conv.checkpoints, "Sample counts to report")->delimiter(',');
  conv_cmd->add_option("--seed", conv.seed, "RNG seed");
  conv_cmd->add_option("--threads", conv.threads, "Worker threads; output does not depend on it");
  conv_cmd->add_option("-o,--out", conv.out, "Output path, - for stdout");

  FairdivOptions fd;
  auto* fd_cmd = app.add_subcommand("fairdiv", "Simulate the like mechanism on a profile");
  fd_cmd->add_option("--profile", fd.profile, "Profile JSON")->required();
  fd_cmd->add_option("--runs", fd.runs, "Independent runs (run k uses seed + k)");
  fd_cmd->add_option("--seed", fd.seed, "RNG seed of run 0");
  fd_cmd->add_option("--runs-out", fd.runs_out, "Per-run allocations CSV");
  fd_cmd->add_option("--envy-out", fd.envy_out, "Ex-ante envy matrix CSV");
  fd_cmd->add_option("--ex-post-out", fd.ex_post_out, "Per-run max ex-post envy CSV");
  fd_cmd->add_option("--freq-out", fd.freq_out, "Empirical vs expected win frequencies CSV");
  fd_cmd->add_flag("--check-strategyproof", fd.check_strategyproof, "Exhaustive best-response search per agent");

  CostTableOptions ct;
  auto* ct_cmd = app.add_subcommand("cost-table", "Dump every coalition cost");
  ct_cmd->add_option("--instance", ct.instance, "Instance JSON")->required();
  ct_cmd->add_option("--mode", ct.mode, "exact | heuristic | fixed_order");
  ct_cmd->add_option("--order", ct.order, "Visiting order for fixed_order (default 1..n)")->delimiter(',');
  ct_cmd->add_option("-o,--out", ct.out, "Output path, - for stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kValidationFailure;
  }

  try {
    if (gen_cmd->parsed()) cmd_gen(gen, out, err);
    if (alloc_cmd->parsed()) cmd_allocate(alloc, out);
    if (conv_cmd->parsed()) cmd_convergence(conv, out);
    if (fd_cmd->parsed()) cmd_fairdiv(fd, out);
    if (ct_cmd->parsed()) cmd_cost_table(ct, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << "\n";
    return kValidationFailure;
  } catch (const CapabilityError& e) {
    err << "capability error: " << e.what() << "\n";
    return kCapabilityFailure;
  }
  return kOk;
}

}  // namespace fairalloc::cli
