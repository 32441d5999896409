#include "fairalloc/fairdiv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "fairalloc/error.hpp"

namespace fairalloc::fairdiv {

BinaryMatrix::BinaryMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), cells_(rows * cols, 0) {}

BinaryMatrix::BinaryMatrix(const std::vector<std::vector<int>>& rows)
    : rows_(rows.size()), cols_(rows.empty() ? 0 : rows.front().size()) {
  cells_.reserve(rows_ * cols_);
  for (std::size_t r = 0; r < rows_; ++r) {
    if (rows[r].size() != cols_) {
      throw ValidationError(fmt::format("row {}: expected {} entries, got {}", r, cols_, rows[r].size()));
    }
    for (std::size_t c = 0; c < cols_; ++c) {
      const int v = rows[r][c];
      if (v != 0 && v != 1) throw ValidationError(fmt::format("[{}][{}]: entries must be 0 or 1", r, c));
      cells_.push_back(static_cast<std::uint8_t>(v));
    }
  }
}

LikeProfile::LikeProfile(BinaryMatrix utilities) : utilities_(utilities), reports_(std::move(utilities)) {}

LikeProfile::LikeProfile(BinaryMatrix utilities, BinaryMatrix reports)
    : utilities_(std::move(utilities)), reports_(std::move(reports)) {
  if (utilities_.rows() != reports_.rows() || utilities_.cols() != reports_.cols()) {
    throw ValidationError(fmt::format("reports: shape {}x{} differs from utilities {}x{}", reports_.rows(),
                                      reports_.cols(), utilities_.rows(), utilities_.cols()));
  }
}

std::vector<int> LikeProfile::likers(std::size_t item) const {
  std::vector<int> out;
  for (std::size_t a = 0; a < agents(); ++a) {
    if (reports_.at(a, item)) out.push_back(static_cast<int>(a));
  }
  return out;
}

namespace {

BinaryMatrix parse_matrix(const nlohmann::json& value, const char* field) {
  if (!value.is_array()) throw ValidationError(fmt::format("{}: must be an array of arrays", field));
  std::vector<std::vector<int>> rows;
  for (std::size_t r = 0; r < value.size(); ++r) {
    if (!value[r].is_array()) throw ValidationError(fmt::format("{}[{}]: must be an array", field, r));
    std::vector<int> row;
    for (std::size_t c = 0; c < value[r].size(); ++c) {
      if (!value[r][c].is_number_integer()) {
        throw ValidationError(fmt::format("{}[{}][{}]: must be 0 or 1", field, r, c));
      }
      row.push_back(value[r][c].get<int>());
    }
    rows.push_back(std::move(row));
  }
  try {
    return BinaryMatrix(rows);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}{}", field, e.what()));
  }
}

}  // namespace

LikeProfile load_profile(std::string_view document) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("document: malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("utilities")) throw ValidationError("utilities: missing");
  BinaryMatrix utilities = parse_matrix(doc["utilities"], "utilities");
  if (doc.contains("reports") && !doc["reports"].is_null()) {
    return LikeProfile(std::move(utilities), parse_matrix(doc["reports"], "reports"));
  }
  return LikeProfile(std::move(utilities));
}

LikeProfile load_profile_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open profile file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_profile(buf.str());
}

std::optional<int> like_mechanism_step(std::span<const int> likers, Rng& rng) {
  if (likers.empty()) return std::nullopt;
  return likers[uniform_index(rng, likers.size())];
}

std::optional<int> LikeMechanism::allocate_next(std::span<const int> likers) {
  const std::optional<int> winner = like_mechanism_step(likers, rng_);
  record_.winner.push_back(winner);
  record_.seed = seed_;
  return winner;
}

AllocationRecord LikeMechanism::take_record() {
  AllocationRecord out = std::move(record_);
  out.seed = seed_;
  record_ = {};
  return out;
}

AllocationRecord run_like_mechanism(const LikeProfile& profile, std::uint64_t seed) {
  LikeMechanism mechanism(seed);
  for (std::size_t t = 0; t < profile.items(); ++t) mechanism.allocate_next(profile.likers(t));
  return mechanism.take_record();
}

std::vector<std::vector<double>> expected_allocation(const LikeProfile& profile) {
  std::vector<std::vector<double>> probs(profile.agents(), std::vector<double>(profile.items(), 0.0));
  for (std::size_t t = 0; t < profile.items(); ++t) {
    const std::vector<int> likers = profile.likers(t);
    for (int a : likers) probs[static_cast<std::size_t>(a)][t] = 1.0 / static_cast<double>(likers.size());
  }
  return probs;
}

std::vector<std::vector<double>> ex_ante_envy(const LikeProfile& profile) {
  const auto probs = expected_allocation(profile);
  const std::size_t n = profile.agents();
  std::vector<std::vector<double>> envy(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    auto value_of = [&](std::size_t j) {
      double v = 0.0;
      for (std::size_t t = 0; t < profile.items(); ++t) {
        if (profile.utilities().at(i, t)) v += probs[j][t];
      }
      return v;
    };
    const double own = value_of(i);
    for (std::size_t j = 0; j < n; ++j) envy[i][j] = i == j ? 0.0 : value_of(j) - own;
  }
  return envy;
}

ExPostEnvy ex_post_envy(const AllocationRecord& record, const LikeProfile& profile) {
  const std::size_t n = profile.agents();
  if (record.winner.size() != profile.items()) {
    throw ValidationError(fmt::format("record covers {} items, profile has {}", record.winner.size(),
                                      profile.items()));
  }
  std::vector<std::vector<int>> bundle_value(n, std::vector<int>(n, 0));  // [i][j] = u_i(bundle_j)
  for (std::size_t t = 0; t < profile.items(); ++t) {
    const auto& w = record.winner[t];
    const bool has_likers = !profile.likers(t).empty();
    if (!w) {
      if (has_likers) throw ValidationError(fmt::format("item {}: has likers but is unallocated", t));
      continue;
    }
    if (*w < 0 || static_cast<std::size_t>(*w) >= n) {
      throw ValidationError(fmt::format("item {}: winner {} is not an agent", t, *w));
    }
    const auto j = static_cast<std::size_t>(*w);
    if (!profile.reports().at(j, t)) {
      throw ValidationError(fmt::format("item {}: winner {} did not report liking it", t, j));
    }
    for (std::size_t i = 0; i < n; ++i) bundle_value[i][j] += profile.utilities().at(i, t) ? 1 : 0;
  }
  ExPostEnvy out{std::vector<std::vector<int>>(n, std::vector<int>(n, 0)), 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      out.envy[i][j] = bundle_value[i][j] - bundle_value[i][i];
      out.max_envy = std::max(out.max_envy, out.envy[i][j]);
    }
  }
  return out;
}

double expected_utility(const LikeProfile& profile, std::size_t agent, std::uint32_t report) {
  double value = 0.0;
  for (std::size_t t = 0; t < profile.items(); ++t) {
    if (!((report >> t) & 1u) || !profile.utilities().at(agent, t)) continue;
    std::size_t others = 0;
    for (std::size_t a = 0; a < profile.agents(); ++a) {
      if (a != agent && profile.reports().at(a, t)) ++others;
    }
    value += 1.0 / static_cast<double>(others + 1);
  }
  return value;
}

BestResponse best_response_search(const LikeProfile& profile, std::size_t agent) {
  const std::size_t m = profile.items();
  if (m > kMaxEnumeratedItems) {
    throw CapabilityError(fmt::format("best response search enumerates 2^m reports; m = {} exceeds {}", m,
                                      kMaxEnumeratedItems));
  }
  if (agent >= profile.agents()) throw ValidationError(fmt::format("agent {} out of range", agent));
  std::uint32_t truthful = 0;
  for (std::size_t t = 0; t < m; ++t) {
    if (profile.utilities().at(agent, t)) truthful |= 1u << t;
  }
  const std::uint32_t reports = 1u << m;
  std::vector<double> value(reports);
  BestResponse out;
  out.best_utility = -1.0;
  for (std::uint32_t r = 0; r < reports; ++r) {
    value[r] = expected_utility(profile, agent, r);
    out.best_utility = std::max(out.best_utility, value[r]);
  }
  constexpr double kTol = 1e-12;
  for (std::uint32_t r = 0; r < reports; ++r) {
    if (value[r] >= out.best_utility - kTol) out.argmax.push_back(r);
  }
  out.truthful_utility = value[truthful];
  out.truthful_optimal = out.truthful_utility >= out.best_utility - kTol;
  return out;
}

void write_run_csv(std::ostream& out, std::size_t run, const AllocationRecord& record, bool header) {
  if (header) out << "run,item,winner\n";
  for (std::size_t t = 0; t < record.winner.size(); ++t) {
    if (record.winner[t]) {
      out << fmt::format("{},{},{}\n", run, t, *record.winner[t]);
    } else {
      out << fmt::format("{},{},\n", run, t);
    }
  }
}

void write_envy_csv(std::ostream& out, const std::vector<std::vector<double>>& envy) {
  out << "i,j,envy\n";
  for (std::size_t i = 0; i < envy.size(); ++i) {
    for (std::size_t j = 0; j < envy[i].size(); ++j) out << fmt::format("{},{},{}\n", i, j, envy[i][j]);
  }
}

}  // namespace fairalloc::fairdiv
