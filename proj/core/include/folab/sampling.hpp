#pragma once

#include <cstdint>
#include <vector>

namespace folab {

/// splitmix64: tiny, portable, deterministic PRNG used for seeded test
/// fields and coefficient draws. Unlike <random> distributions its output
/// is bit-identical across standard library implementations.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [-1, 1].
    double symmetric() { return 2.0 * uniform() - 1.0; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

/// Radical-inverse (van der Corput) digit reversal in the given base.
double radical_inverse(std::uint64_t index, unsigned base);

/// Low-discrepancy Halton points in [0,1)^dim. The seed offsets the start
/// index, so distinct seeds give distinct but reproducible point sets.
std::vector<std::vector<double>> halton_points(int dim, int count, std::uint64_t seed);

} // namespace folab
