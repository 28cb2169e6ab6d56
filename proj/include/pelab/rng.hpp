#ifndef PELAB_RNG_HPP
#define PELAB_RNG_HPP

#include <cstdint>
#include <random>

namespace pelab {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Child seed for the `counter`-th stream of `master`.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t counter) {
  return splitmix64(splitmix64(master) ^ splitmix64(counter + 0x632BE59BD9B4E019ULL));
}

}  // namespace pelab

#endif  // PELAB_RNG_HPP
