#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace mmc {

/// Deterministic seeded RNG. The engine (std::mt19937_64) is fully specified
/// by the standard; the distributions below are hand-rolled because the
/// standard library's are implementation-defined and would break bit-for-bit
/// reproducibility across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform01();
    }

    /// Uniform index in [0, n). Modulo bias is below 2^-40 for any n that
    /// fits in memory here.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(eng_() % static_cast<std::uint64_t>(n));
    }

    /// Standard normal via Box-Muller (no cached spare, to keep the
    /// call-for-call stream layout obvious).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    std::uint64_t next_u64() { return eng_(); }

private:
    std::mt19937_64 eng_;
};

/// SplitMix64 finalizer; used to derive independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace mmc
