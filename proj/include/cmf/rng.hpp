#pragma once

// Deterministic splittable randomness.  Every trial owns a private stream
// derived from (seed, trial index), so results are independent of execution
// order and thread count, and any single trial can be replayed in isolation.

#include <cstdint>
#include <cmath>

namespace cmf {

/// splitmix64: golden-ratio increment with a 64-bit finalizer.  Tiny state,
/// full period, good enough statistics for Monte Carlo estimation.
struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0,1]; never 0, so logs stay finite.
    double uniform_pos() {
        return (static_cast<double>(next() >> 11) + 1.0) * 0x1.0p-53;
    }
};

/// Stream for one trial.  The xor offset keeps per-trial state sequences off
/// each other's golden-ratio orbit (an additive offset would just time-shift
/// stream 0); one warm-up step separates neighboring indices further.
inline SplitMix64 trial_rng(std::uint64_t seed, std::uint64_t trial_index) {
    SplitMix64 r;
    r.state = seed ^ (0x9E3779B97F4A7C15ULL * (trial_index + 1));
    r.next();
    return r;
}

struct NormalPair {
    double z0 = 0.0;
    double z1 = 0.0;
};

/// Box-Muller, consuming exactly two uniforms.
inline NormalPair standard_normal_pair(SplitMix64& rng) {
    double u1 = rng.uniform_pos();
    double u2 = rng.uniform_pos();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586 * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

}  // namespace cmf
