#pragma once

// Deterministic random number utilities: a 64-bit SplitMix stream and the
// injective (base_seed, replica) -> stream-seed derivation used by the
// replica runner.

#include <cstdint>

namespace aniwalk {

// Bijective 64-bit finalizer (SplitMix64 / murmur3-style avalanche).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stream seed for replica r under base_seed. For a fixed base seed the map
// r -> seed is injective: r -> phi*(r+1) is a bijection mod 2^64 (phi odd),
// XOR with the base preserves that, and mix64 is itself a bijection.
constexpr std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t r) noexcept {
    return mix64(base_seed ^ (0x9e3779b97f4a7c15ULL * (r + 1)));
}

// SplitMix64 generator. Cheap enough for per-step sampling in 1e11-step
// Monte Carlo sweeps; satisfies UniformRandomBitGenerator.
class SplitMix64 {
  public:
    using result_type = std::uint64_t;

    explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

    constexpr std::uint64_t operator()() noexcept {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t min() noexcept { return 0; }
    static constexpr std::uint64_t max() noexcept { return ~0ULL; }

    // Uniform double in [0, 1), 53-bit resolution.
    double uniform() noexcept { return double(operator()() >> 11) * 0x1.0p-53; }

    // Uniform double in (0, 1); never 0, safe under log().
    double uniform_open() noexcept { return (double(operator()() >> 11) + 0.5) * 0x1.0p-53; }

  private:
    std::uint64_t state_;
};

}  // namespace aniwalk
