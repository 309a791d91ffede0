#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace gridfusion {

/// splitmix64 generator. Deterministic for a given seed independent of the
/// standard library, which keeps fixtures reproducible across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [lo, hi], bounds inclusive.
    int uniform_int(int lo, int hi) {
        return lo + int(next_u64() % std::uint64_t(hi - lo + 1));
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Box-Muller draw; always consumes two uniforms, no cached spare.
    double gauss(double mean, double sigma) {
        const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
        const double u2 = uniform();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace gridfusion
