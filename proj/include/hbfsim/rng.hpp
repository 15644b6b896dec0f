// SPDX-License-Identifier: Apache-2.0
#pragma once

// Seedable, portable random number generation.
//
// The standard library's distributions are implementation-defined, which
// breaks the bit-identical reproducibility contract across toolchains.
// Everything here is pinned: xoshiro256++ for the stream, SplitMix64 for
// seeding and stream derivation, and explicit bit-to-double mappings.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace hbfsim {

// One SplitMix64 step from an explicit state value.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256++ (Blackman/Vigna), state filled from SplitMix64(seed).
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0,1): top 53 bits scaled by 2^-53.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0,1], used where log(0) must be impossible.
    double uniform01_open_zero() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Standard complex normal CN(0,1): one Box-Muller pair per draw,
    // real and imaginary parts each N(0, 1/2).
    std::complex<double> cnormal() {
        const double u1 = uniform01_open_zero();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * std::numbers::pi * u2;
        return {r * std::cos(phi) * std::numbers::sqrt2 / 2.0,
                r * std::sin(phi) * std::numbers::sqrt2 / 2.0};
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::uint64_t state_[4];
};

// Seed for Monte-Carlo trial i: one SplitMix64 step from state
// master + (i+1) * golden ratio. O(1) access for any trial index.
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
    std::uint64_t s = master_seed + (trial + 1) * 0x9E3779B97F4A7C15ull;
    return splitmix64(s);
}

// Decorrelated sub-stream of a seed (e.g. precoder vs combiner solver stage).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t t = tag;
    std::uint64_t s = seed ^ splitmix64(t);
    return splitmix64(s);
}

} // namespace hbfsim
