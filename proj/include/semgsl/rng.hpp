#pragma once

#include <cstdint>
#include <span>

namespace semgsl {

/// Deterministic 64-bit generator (splitmix64). Used instead of <random>
/// engines and distributions so that seeded runs reproduce bit-exactly
/// across compilers and standard-library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

    bool bernoulli(double p) { return next_unit() < p; }

    /// Draws an index from an (approximately normalized) probability vector
    /// by scanning the cumulative sum; rounding leftovers fall on the last
    /// index.
    std::size_t pick(std::span<const double> probs) {
        double u = next_unit();
        double cum = 0.0;
        for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
            cum += probs[i];
            if (u < cum) return i;
        }
        return probs.empty() ? 0 : probs.size() - 1;
    }

private:
    std::uint64_t state_;
};

} // namespace semgsl
