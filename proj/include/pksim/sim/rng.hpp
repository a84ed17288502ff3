// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace pksim {

// Single deterministic randomness source for a simulation run. Every random
// choice (key material, pop selection, latency samples, fault coins) flows
// through an instance of this class; nothing in the library reads the wall
// clock or the OS entropy pool.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t raw() { return engine_(); }

    // Unbiased integer in [lo, hi].
    std::uint64_t range(std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(engine_);
    }

    // Index in [0, n).
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(range(0, n - 1)); }

    double real01() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    bool chance(double p) {
        if (p <= 0.0) return false;
        if (p >= 1.0) return true;
        return real01() < p;
    }

    double lognormal(double mu, double sigma) {
        return std::lognormal_distribution<double>(mu, sigma)(engine_);
    }

    void fill(std::span<std::uint8_t> out) {
        std::size_t i = 0;
        while (i < out.size()) {
            std::uint64_t v = engine_();
            for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
                out[i] = static_cast<std::uint8_t>(v >> (8 * b));
            }
        }
    }

    // Derives an independent, reproducible child stream. Used to give each
    // actor its own stream so one actor's draw count cannot perturb another.
    Rng fork(std::string_view label) {
        std::uint64_t h = 1469598103934665603ULL;
        for (char c : label) {
            h ^= static_cast<std::uint8_t>(c);
            h *= 1099511628211ULL;
        }
        return Rng(h ^ engine_());
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace pksim
