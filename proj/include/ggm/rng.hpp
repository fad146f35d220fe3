#pragma once

#include <cstdint>

namespace ggm {

// splitmix64; a full-period mix of the 64-bit state.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Counter-based random stream: every variate is a pure function of
/// (seed, stream, index), so draws can be evaluated in any order or from any
/// number of workers with bit-identical results.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

    std::uint64_t bits(std::uint64_t index) const {
        return splitmix64(key_ ^ splitmix64(index * 0xD1342543DE82EF95ULL + 1));
    }

    // Uniform in (0, 1).
    double uniform(std::uint64_t index) const {
        return (double(bits(index) >> 11) + 0.5) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound); bound >= 1.
    std::uint64_t uniform_int(std::uint64_t index, std::uint64_t bound) const {
        return bits(index) % bound;
    }

    // Standard normal via Box-Muller on two derived uniforms.
    double normal(std::uint64_t index) const;

private:
    std::uint64_t key_;
};

}  // namespace ggm
