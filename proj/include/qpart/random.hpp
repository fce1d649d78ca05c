#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace qpart {

/// Deterministic random source used throughout the library.  All draws go
/// through raw 64-bit outputs of mt19937_64 so that results are identical
/// across standard library implementations (std::uniform_real_distribution
/// and friends make no such guarantee).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform angle in [0, 2*pi).
    double uniform_angle() { return uniform(0.0, 2.0 * std::numbers::pi); }

    /// Standard normal via Box-Muller on the deterministic uniform source.
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) {
            u1 = uniform();
        }
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Index in [0, bound).  Simple modulo; bias is irrelevant here, only
    /// determinism matters.
    std::size_t index(std::size_t bound) {
        return static_cast<std::size_t>(engine_() % bound);
    }

    void fill_uniform_angles(std::span<double> out) {
        for (double& v : out) {
            v = uniform_angle();
        }
    }

  private:
    std::mt19937_64 engine_;
};

/// Mixes a master seed with stream identifiers so that parallel trials get
/// independent, reproducible substreams (splitmix64 finalizer).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (a + 1) +
                      0xbf58476d1ce4e5b9ull * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

}  // namespace qpart
