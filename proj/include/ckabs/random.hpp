#pragma once

#include <cstdint>

namespace ckabs {

// Deterministic 64-bit generator (SplitMix64).  Used instead of <random>
// engines plus distributions so that sampled values are bit-identical
// across platforms and standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    std::uint64_t state_;
};

// Stateless derivation of child seeds.  Trajectory indices, refinement
// iterations and candidate blocks each get their own stream; results are
// therefore independent of evaluation order and thread scheduling.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    Rng rng(seed ^ (0x9e3779b97f4a7c15ull * (index + 1)));
    return rng.next_u64();
}

}  // namespace ckabs
