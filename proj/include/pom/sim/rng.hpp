#pragma once

#include <cstdint>

namespace pom::sim {

/// SplitMix64, the mixing generator from java.util.SplittableRandom
/// (Steele/Lea/Flood, "Fast Splittable Pseudorandom Number Generators").
/// Chosen on purpose over std::mt19937_64: the algorithm is three lines,
/// published, and trivially re-implementable, so simulation streams are
/// reproducible at the statistical level in any language. Bit-identical
/// streams are guaranteed only within this implementation.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53 random bits.
    double next_double() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform in (0, 1), both endpoints excluded. Feeding this to a log
    /// keeps exponential samples finite and strictly positive, which in turn
    /// keeps simulated timestamps strictly increasing.
    double next_open() {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }
};

/// Child seed for an independent stream. Trials are seeded with
/// derive_seed(scenario seed, trial index), so a parallel driver splitting
/// trials across workers reproduces the serial statistics exactly.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 g(seed);
    const std::uint64_t base = g.next();
    SplitMix64 h(base ^ (0x9E3779B97F4A7C15ull * stream));
    return h.next();
}

}  // namespace pom::sim
