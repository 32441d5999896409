#include "fairalloc/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fairalloc/error.hpp"

namespace fairalloc {

using nlohmann::json;

CoalitionMask CoalitionMask::of_ids(const std::vector<int>& ids) {
  std::uint32_t bits = 0;
  for (int id : ids) bits |= 1u << (id - 1);
  return CoalitionMask(bits);
}

std::vector<int> CoalitionMask::ids() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(count()));
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b) + 1);
  return out;
}

namespace {

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

}  // namespace

ProblemInstance::ProblemInstance(Location depot, std::vector<Customer> customers, CostParams cost,
                                 std::vector<std::vector<double>> matrix,
                                 std::vector<std::vector<int>> groups)
    : depot_(depot),
      customers_(std::move(customers)),
      cost_(cost),
      matrix_(std::move(matrix)),
      groups_(std::move(groups)) {
  require(depot_.id == 0, "depot.id: depot must have id 0");
  require(std::isfinite(depot_.x) && std::isfinite(depot_.y), "depot: coordinates must be finite");
  std::sort(customers_.begin(), customers_.end(),
            [](const Customer& a, const Customer& b) { return a.id < b.id; });
  const std::size_t n = customers_.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Customer& c = customers_[k];
    const std::string where = fmt::format("customers[id={}]", c.id);
    require(c.id == static_cast<int>(k) + 1,
            fmt::format("customers.id: ids must be exactly 1..{} (found {})", n, c.id));
    require(c.location.id == c.id, where + ".location: id must match customer id");
    require(std::isfinite(c.location.x) && std::isfinite(c.location.y),
            where + ".x/y: coordinates must be finite");
    require(finite_nonneg(c.demand_weight), where + ".weight: must be finite and >= 0");
    require(finite_nonneg(c.demand_volume), where + ".volume: must be finite and >= 0");
  }

  require(finite_nonneg(cost_.fixed_cost_per_tour), "cost.fixed: must be finite and >= 0");
  require(finite_nonneg(cost_.cost_per_distance), "cost.per_distance: must be finite and >= 0");
  require(finite_nonneg(cost_.cost_per_stop), "cost.per_stop: must be finite and >= 0");

  if (!matrix_.empty()) {
    require(matrix_.size() == n + 1, fmt::format("matrix: expected {} rows", n + 1));
    for (std::size_t i = 0; i <= n; ++i) {
      require(matrix_[i].size() == n + 1, fmt::format("matrix[{}]: expected {} columns", i, n + 1));
    }
    for (std::size_t i = 0; i <= n; ++i) {
      require(matrix_[i][i] == 0.0, fmt::format("matrix[{}][{}]: diagonal must be 0", i, i));
      for (std::size_t j = 0; j <= n; ++j) {
        require(finite_nonneg(matrix_[i][j]),
                fmt::format("matrix[{}][{}]: must be finite and >= 0", i, j));
        require(matrix_[i][j] == matrix_[j][i],
                fmt::format("matrix[{}][{}]: not symmetric ({} vs {})", i, j, matrix_[i][j],
                            matrix_[j][i]));
      }
    }
  }

  std::set<int> seen;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    require(!groups_[g].empty(), fmt::format("groups[{}]: must not be empty", g));
    for (int id : groups_[g]) {
      require(id >= 1 && id <= static_cast<int>(n),
              fmt::format("groups[{}]: unknown customer id {}", g, id));
      require(seen.insert(id).second,
              fmt::format("groups[{}]: customer {} already belongs to another group", g, id));
    }
    std::sort(groups_[g].begin(), groups_[g].end());
  }

  // Chain labels resolve to the declared group holding their customers. With
  // no declared groups, each label defines one.
  std::map<std::string, std::vector<int>> chains;
  std::vector<std::string> chain_order;
  for (const Customer& c : customers_) {
    if (!c.chain) continue;
    auto [it, inserted] = chains.try_emplace(*c.chain);
    if (inserted) chain_order.push_back(*c.chain);
    it->second.push_back(c.id);
  }
  if (groups_.empty()) {
    for (const std::string& label : chain_order) groups_.push_back(chains[label]);
  } else {
    for (const auto& [label, ids] : chains) {
      std::optional<std::size_t> owner;
      for (int id : ids) {
        auto g = std::find_if(groups_.begin(), groups_.end(), [id](const std::vector<int>& grp) {
          return std::binary_search(grp.begin(), grp.end(), id);
        });
        require(g != groups_.end(),
                fmt::format("customers[id={}].chain: '{}' references no declared group", id, label));
        const auto index = static_cast<std::size_t>(g - groups_.begin());
        require(!owner || *owner == index,
                fmt::format("customers[id={}].chain: '{}' spans several declared groups", id, label));
        owner = index;
      }
    }
  }

  dist_.assign((n + 1) * (n + 1), 0.0);
  for (std::size_t a = 0; a <= n; ++a) {
    for (std::size_t b = 0; b <= n; ++b) {
      if (!matrix_.empty()) {
        dist_[a * (n + 1) + b] = matrix_[a][b];
      } else {
        const Location& la = location(static_cast<int>(a));
        const Location& lb = location(static_cast<int>(b));
        dist_[a * (n + 1) + b] = a == b ? 0.0 : std::hypot(la.x - lb.x, la.y - lb.y);
      }
    }
  }
}

const Customer& ProblemInstance::customer(int id) const {
  if (id < 1 || id > static_cast<int>(size())) {
    throw ValidationError(fmt::format("customer id {} out of range 1..{}", id, size()));
  }
  return customers_[static_cast<std::size_t>(id - 1)];
}

const Location& ProblemInstance::location(int id) const {
  if (id == 0) return depot_;
  return customer(id).location;
}

double ProblemInstance::distance(int a, int b) const {
  const int last = static_cast<int>(size());
  if (a < 0 || a > last || b < 0 || b > last) {
    throw ValidationError(fmt::format("location id out of range 0..{} ({}, {})", last, a, b));
  }
  return dist_[static_cast<std::size_t>(a) * (size() + 1) + static_cast<std::size_t>(b)];
}

std::vector<CoalitionMask> ProblemInstance::group_masks() const {
  std::vector<CoalitionMask> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) out.push_back(CoalitionMask::of_ids(g));
  return out;
}

bool ProblemInstance::group_feasible(CoalitionMask mask) const {
  for (CoalitionMask g : group_masks()) {
    const CoalitionMask hit = mask & g;
    if (!hit.is_empty() && hit != g) return false;
  }
  return true;
}

std::string ProblemInstance::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : to_json(*this)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

namespace {

double number_at(const json& obj, const char* key, const std::string& where) {
  require(obj.contains(key), where + "." + key + ": missing");
  const json& v = obj.at(key);
  require(v.is_number(), where + "." + key + ": must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  return number_at(obj, key, where);
}

}  // namespace

ProblemInstance load_instance(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("document: malformed JSON: ") + e.what());
  }
  require(doc.is_object(), "document: top level must be an object");

  require(doc.contains("depot") && doc["depot"].is_object(), "depot: missing or not an object");
  Location depot{0, number_at(doc["depot"], "x", "depot"), number_at(doc["depot"], "y", "depot")};

  require(doc.contains("customers") && doc["customers"].is_array(),
          "customers: missing or not an array");
  std::vector<Customer> customers;
  for (std::size_t k = 0; k < doc["customers"].size(); ++k) {
    const json& c = doc["customers"][k];
    const std::string where = fmt::format("customers[{}]", k);
    require(c.is_object(), where + ": must be an object");
    require(c.contains("id") && c["id"].is_number_integer(), where + ".id: missing or not an integer");
    Customer cust;
    cust.id = c["id"].get<int>();
    cust.location = {cust.id, number_at(c, "x", where), number_at(c, "y", where)};
    cust.demand_weight = number_or(c, "weight", 1.0, where);
    cust.demand_volume = number_or(c, "volume", 1.0, where);
    if (c.contains("chain") && !c["chain"].is_null()) {
      require(c["chain"].is_string(), where + ".chain: must be a string");
      cust.chain = c["chain"].get<std::string>();
    }
    customers.push_back(std::move(cust));
  }

  CostParams cost;
  if (doc.contains("cost")) {
    const json& c = doc["cost"];
    require(c.is_object(), "cost: must be an object");
    cost.fixed_cost_per_tour = number_or(c, "fixed", 0.0, "cost");
    cost.cost_per_distance = number_or(c, "per_distance", 1.0, "cost");
    cost.cost_per_stop = number_or(c, "per_stop", 0.0, "cost");
  }

  std::vector<std::vector<double>> matrix;
  if (doc.contains("matrix") && !doc["matrix"].is_null()) {
    const json& m = doc["matrix"];
    require(m.is_array(), "matrix: must be an array of arrays");
    for (std::size_t i = 0; i < m.size(); ++i) {
      require(m[i].is_array(), fmt::format("matrix[{}]: must be an array", i));
      std::vector<double> row;
      for (std::size_t j = 0; j < m[i].size(); ++j) {
        require(m[i][j].is_number(), fmt::format("matrix[{}][{}]: must be a number", i, j));
        row.push_back(m[i][j].get<double>());
      }
      matrix.push_back(std::move(row));
    }
  }

  std::vector<std::vector<int>> groups;
  if (doc.contains("groups") && !doc["groups"].is_null()) {
    const json& gs = doc["groups"];
    require(gs.is_array(), "groups: must be an array of arrays");
    for (std::size_t g = 0; g < gs.size(); ++g) {
      require(gs[g].is_array(), fmt::format("groups[{}]: must be an array", g));
      std::vector<int> ids;
      for (const json& id : gs[g]) {
        require(id.is_number_integer(), fmt::format("groups[{}]: ids must be integers", g));
        ids.push_back(id.get<int>());
      }
      groups.push_back(std::move(ids));
    }
  }

  return ProblemInstance(depot, std::move(customers), cost, std::move(matrix), std::move(groups));
}

ProblemInstance load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open instance file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_instance(buf.str());
}

std::string to_json(const ProblemInstance& inst) {
  json doc;
  doc["depot"] = {{"x", inst.depot().x}, {"y", inst.depot().y}};
  json customers = json::array();
  for (const Customer& c : inst.customers()) {
    json row = {{"id", c.id},
                {"x", c.location.x},
                {"y", c.location.y},
                {"weight", c.demand_weight},
                {"volume", c.demand_volume}};
    if (c.chain) row["chain"] = *c.chain;
    customers.push_back(std::move(row));
  }
  doc["customers"] = std::move(customers);
  if (inst.has_matrix()) doc["matrix"] = inst.matrix();
  const CostParams& cp = inst.cost_params();
  doc["cost"] = {{"fixed", cp.fixed_cost_per_tour},
                 {"per_distance", cp.cost_per_distance},
                 {"per_stop", cp.cost_per_stop}};
  if (!inst.groups().empty()) doc["groups"] = inst.groups();
  return doc.dump(2) + "\n";
}

}  // namespace fairalloc
