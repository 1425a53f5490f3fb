#pragma once

#include <cstdint>
#include <random>

namespace stra {

/// SplitMix64 finalizer; bijective on 64-bit ints, good avalanche.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Independent child seed for (replication index, stream id). Lets every
/// replication own its generator, so results do not depend on how work is
/// split across threads.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                           std::uint64_t stream = 0) {
    return mix64(mix64(master ^ 0x6a09e667f3bcc908ULL) + index * 0x100000001b3ULL +
                 (stream << 32));
}

/// Thin RNG wrapper: one engine, one canonical uniform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [0, 1) bounded away from 0, safe for log() transforms.
    double uniform01_pos() {
        double u = uniform01();
        while (u == 0.0) u = uniform01();
        return u;
    }

    std::uint64_t raw() { return engine_(); }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace stra
