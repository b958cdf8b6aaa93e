#pragma once

#include <cstdint>
#include <vector>

#include "ebql/errors.hpp"

namespace ebql {

// Deterministic, splittable PRNG built on SplitMix64.
//
// The raw stream is fully specified by the 64-bit seed, so equal seeds give
// bit-identical draws on every platform. Child streams are derived by mixing
// the parent seed with the child index through two rounds of the SplitMix64
// finalizer; children with distinct indices are statistically independent of
// each other and of the parent.
//
// Gaussians use Box-Muller with a cached spare, so the gaussian stream is a
// fixed function of the uniform stream.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased integer in [0, n) via rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw InvalidParameter("uniform_below: n must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    double gaussian(double mean, double std);
    std::vector<double> gaussians(double mean, double std, std::size_t n);

    // Deterministic child stream; independent of draws made on the parent.
    Rng child(std::uint64_t index) const {
        std::uint64_t z = seed_ ^ (0x632BE59BD9B4E019ULL + index * 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::uint64_t state_;
    std::uint64_t seed_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ebql
