#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "fairalloc/rng.hpp"

namespace fairalloc::fairdiv {

// agents x items matrix with entries in {0, 1}, row-major.
class BinaryMatrix {
 public:
  BinaryMatrix() = default;
  BinaryMatrix(std::size_t rows, std::size_t cols);
  explicit BinaryMatrix(const std::vector<std::vector<int>>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool at(std::size_t r, std::size_t c) const { return cells_[r * cols_ + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) { cells_[r * cols_ + c] = v ? 1 : 0; }

  friend bool operator==(const BinaryMatrix&, const BinaryMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> cells_;
};

// True 0/1 utilities and declared likes. Sincere unless reports are given.
class LikeProfile {
 public:
  explicit LikeProfile(BinaryMatrix utilities);
  LikeProfile(BinaryMatrix utilities, BinaryMatrix reports);

  std::size_t agents() const { return utilities_.rows(); }
  std::size_t items() const { return utilities_.cols(); }
  const BinaryMatrix& utilities() const { return utilities_; }
  const BinaryMatrix& reports() const { return reports_; }
  bool sincere() const { return utilities_ == reports_; }

  // Agents reporting a like for `item`, ascending.
  std::vector<int> likers(std::size_t item) const;

 private:
  BinaryMatrix utilities_;
  BinaryMatrix reports_;
};

// `{"utilities": [[0|1]], "reports": [[0|1]]?}`
LikeProfile load_profile(std::string_view document);
LikeProfile load_profile_file(const std::string& path);

struct AllocationRecord {
  std::vector<std::optional<int>> winner;  // per item; empty = unallocated
  std::uint64_t seed = 0;
};

// One item: uniform over likers, nothing when there are none.
std::optional<int> like_mechanism_step(std::span<const int> likers, Rng& rng);

// Online driver. Each call sees only the current item's likers, so later
// items cannot influence earlier decisions.
class LikeMechanism {
 public:
  explicit LikeMechanism(std::uint64_t seed) : seed_(seed), rng_(make_rng(seed)) {}

  std::optional<int> allocate_next(std::span<const int> likers);
  const AllocationRecord& record() const { return record_; }
  AllocationRecord take_record();

 private:
  std::uint64_t seed_;
  Rng rng_;
  AllocationRecord record_;
};

AllocationRecord run_like_mechanism(const LikeProfile& profile, std::uint64_t seed);

// probs[i][t] = 1/#likers(t) when i reports liking t.
std::vector<std::vector<double>> expected_allocation(const LikeProfile& profile);

// envy[i][j] = u_i(E[bundle_j]) - u_i(E[bundle_i]).
std::vector<std::vector<double>> ex_ante_envy(const LikeProfile& profile);

struct ExPostEnvy {
  std::vector<std::vector<int>> envy;
  int max_envy = 0;
};

// Throws ValidationError when the record is inconsistent with the reports.
ExPostEnvy ex_post_envy(const AllocationRecord& record, const LikeProfile& profile);

// Expected utility of `agent` (by its true utilities) when it declares
// `report` (bit t = likes item t) and everyone else keeps their reports.
double expected_utility(const LikeProfile& profile, std::size_t agent, std::uint32_t report);

inline constexpr std::size_t kMaxEnumeratedItems = 16;

struct BestResponse {
  std::vector<std::uint32_t> argmax;  // every report attaining the maximum
  double best_utility = 0.0;
  double truthful_utility = 0.0;
  bool truthful_optimal = false;
};

// Exhaustive search over all 2^m reports of one agent.
BestResponse best_response_search(const LikeProfile& profile, std::size_t agent);

// `run,item,winner` (winner empty when unallocated)
void write_run_csv(std::ostream& out, std::size_t run, const AllocationRecord& record, bool header);
// `i,j,envy`
void write_envy_csv(std::ostream& out, const std::vector<std::vector<double>>& envy);

}  // namespace fairalloc::fairdiv
