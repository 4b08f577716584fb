#ifndef INCLUDE_GIBBSDP_RNG_HPP
#define INCLUDE_GIBBSDP_RNG_HPP

#include <cstdint>
#include <random>

namespace gibbsdp {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

enum class StreamRole : std::uint64_t { poisson = 1, thin1 = 2, thin2 = 3, oracle = 4, aux = 5 };

/// Seed for the stream (seed, replicate, layer, role).
inline constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t replicate, std::uint64_t layer = 0,
                                           StreamRole role = StreamRole::aux) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ replicate);
  h = splitmix64(h ^ (layer * 0x100000001B3ull));
  return splitmix64(h ^ static_cast<std::uint64_t>(role));
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t replicate, std::uint64_t layer = 0,
                       StreamRole role = StreamRole::aux) {
  return Rng(derive_seed(seed, replicate, layer, role));
}

template<typename Generator>
inline double uniform01(Generator& rng) {
  return std::generate_canonical<double, 53>(rng);
}

}  // namespace gibbsdp

#endif  // INCLUDE_GIBBSDP_RNG_HPP
