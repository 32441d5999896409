#include "fairalloc/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fairalloc/error.hpp"

namespace fairalloc {

DemandDimension parse_demand_dimension(const std::string& name) {
  if (name == "weight") return DemandDimension::kWeight;
  if (name == "volume") return DemandDimension::kVolume;
  if (name == "stops") return DemandDimension::kStops;
  throw ValidationError("dimension: expected weight, volume or stops (got '" + name + "')");
}

ProxyWeights::ProxyWeights(double depot, double demand, double marginal) {
  for (double w : {depot, demand, marginal}) {
    if (!std::isfinite(w) || w < 0.0) throw ValidationError("weights: each must be finite and >= 0");
  }
  const double sum = depot + demand + marginal;
  if (sum <= 0.0) throw ValidationError("weights: at least one must be positive");
  depot_ = depot / sum;
  demand_ = demand / sum;
  marginal_ = marginal / sum;
}

namespace {

AllocationVector proportional(std::vector<double> basis, double grand_cost, std::string method,
                              const char* what) {
  double denom = 0.0;
  for (double b : basis) denom += b;
  if (!(denom > 0.0)) throw ValidationError(fmt::format("{}: total is zero, proxy undefined", what));
  for (double& b : basis) b = grand_cost * b / denom;
  return {std::move(basis), std::move(method)};
}

}  // namespace

AllocationVector depot_distance_proxy(const ProblemInstance& inst, double grand_cost) {
  std::vector<double> d(inst.size());
  for (std::size_t k = 0; k < d.size(); ++k) d[k] = inst.distance(0, static_cast<int>(k) + 1);
  return proportional(std::move(d), grand_cost, "depot", "depot distance");
}

AllocationVector demand_share_proxy(const ProblemInstance& inst, double grand_cost, DemandDimension dimension) {
  std::vector<double> basis;
  basis.reserve(inst.size());
  for (const Customer& c : inst.customers()) {
    switch (dimension) {
      case DemandDimension::kWeight: basis.push_back(c.demand_weight); break;
      case DemandDimension::kVolume: basis.push_back(c.demand_volume); break;
      case DemandDimension::kStops: basis.push_back(1.0); break;
    }
  }
  return proportional(std::move(basis), grand_cost, "demand", "demand");
}

AllocationVector blended_proxy(const ProblemInstance& inst, double grand_cost, const ProxyWeights& weights,
                               const AllocationVector& marginal, DemandDimension dimension) {
  const std::size_t n = inst.size();
  if (marginal.size() != n) {
    throw ValidationError(fmt::format("marginal vector has {} shares, expected {}", marginal.size(), n));
  }
  AllocationVector out{std::vector<double>(n, 0.0), "blend"};
  auto add = [&](double w, const std::vector<double>& shares) {
    if (w == 0.0) return;
    for (std::size_t i = 0; i < n; ++i) out.shares[i] += w * shares[i];
  };
  if (weights.depot() > 0.0) add(weights.depot(), depot_distance_proxy(inst, grand_cost).shares);
  if (weights.demand() > 0.0) add(weights.demand(), demand_share_proxy(inst, grand_cost, dimension).shares);
  if (weights.marginal() > 0.0) {
    std::vector<double> m = marginal.shares;
    const double sum = marginal.total();
    for (double& v : m) v = sum != 0.0 ? grand_cost * v / sum : grand_cost / static_cast<double>(n);
    add(weights.marginal(), m);
  }
  return out;
}

ProxyEvaluation evaluate_proxy(const AllocationVector& proxy, const AllocationVector& exact) {
  if (proxy.size() != exact.size()) {
    throw ValidationError(fmt::format("dimension mismatch: {} proxy shares vs {} exact", proxy.size(), exact.size()));
  }
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ProxyEvaluation ev;
  ev.min_ratio = kInf;
  ev.min_inverse_ratio = kInf;
  double pct_sum = 0.0;
  std::size_t counted = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double p = proxy.shares[i];
    const double e = exact.shares[i];
    if (e == 0.0) {
      ev.ratios.emplace_back();
      ev.zero_exact.push_back(static_cast<int>(i) + 1);
      continue;
    }
    const double r = p / e;
    ev.ratios.emplace_back(r);
    ev.min_ratio = std::min(ev.min_ratio, r);
    if (p != 0.0) ev.min_inverse_ratio = std::min(ev.min_inverse_ratio, e / p);
    pct_sum += std::abs(p - e) / std::abs(e) * 100.0;
    ++counted;
  }
  if (counted > 0) ev.mape = pct_sum / static_cast<double>(counted);
  return ev;
}

}  // namespace fairalloc
