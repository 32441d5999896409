#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fairalloc {

// All randomness in the library flows through mt19937_64. The standard
// distributions are implementation-defined, so bounded integers and unit
// reals are derived from raw 64-bit outputs here to keep streams identical
// across standard libraries.
using Rng = std::mt19937_64;

Rng make_rng(std::uint64_t seed);

// Independent stream for block `block` of a run seeded with `seed`.
Rng make_substream(std::uint64_t seed, std::uint64_t block);

// Uniform integer in [0, bound) by rejection on the top of the range.
// bound must be positive.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Uniform real in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

// Fisher-Yates, from the back.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace fairalloc
