#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace hapticnav::sim {

// mt19937_64's output sequence is fixed by the standard; the distributions are not, so draws
// are derived from raw engine output here to stay bit-identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

    bool bernoulli(double p) { return uniform() < p; }

    // Index drawn with probability proportional to weights (assumed non-negative, summing to ~1).
    std::size_t categorical(std::span<const double> weights) {
        const double u = uniform();
        double acc = 0.0;
        std::size_t last_positive = 0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            last_positive = i;
            acc += weights[i];
            if (u < acc) return i;
        }
        return last_positive;
    }

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finalizer; derives independent per-trial seeds from (base seed, index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace hapticnav::sim
