#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace fairalloc {

// Subset of customers; bit k is customer id k+1.
class CoalitionMask {
 public:
  constexpr CoalitionMask() = default;
  constexpr explicit CoalitionMask(std::uint32_t bits) : bits_(bits) {}

  static constexpr CoalitionMask empty() { return CoalitionMask{}; }
  static constexpr CoalitionMask grand(std::size_t n) {
    return CoalitionMask(n >= 32 ? ~0u : (1u << n) - 1u);
  }
  static CoalitionMask of_ids(const std::vector<int>& ids);

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains_index(std::size_t k) const { return (bits_ >> k) & 1u; }
  constexpr bool contains_id(int id) const { return contains_index(static_cast<std::size_t>(id - 1)); }
  constexpr int count() const { return std::popcount(bits_); }
  constexpr bool is_empty() const { return bits_ == 0; }
  constexpr bool subset_of(CoalitionMask other) const { return (bits_ & ~other.bits_) == 0; }

  constexpr CoalitionMask with_index(std::size_t k) const { return CoalitionMask(bits_ | (1u << k)); }
  constexpr CoalitionMask without_index(std::size_t k) const { return CoalitionMask(bits_ & ~(1u << k)); }
  constexpr CoalitionMask operator|(CoalitionMask o) const { return CoalitionMask(bits_ | o.bits_); }
  constexpr CoalitionMask operator&(CoalitionMask o) const { return CoalitionMask(bits_ & o.bits_); }

  // Customer ids in increasing order.
  std::vector<int> ids() const;

  friend constexpr bool operator==(CoalitionMask, CoalitionMask) = default;

 private:
  std::uint32_t bits_ = 0;
};

}  // namespace fairalloc
