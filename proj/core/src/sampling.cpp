#include "folab/sampling.hpp"

namespace folab {

namespace {
constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
}

double radical_inverse(std::uint64_t index, unsigned base) {
    double result = 0.0;
    double inv_base = 1.0 / base;
    double frac = inv_base;
    while (index > 0) {
        result += static_cast<double>(index % base) * frac;
        index /= base;
        frac *= inv_base;
    }
    return result;
}

std::vector<std::vector<double>> halton_points(int dim, int count, std::uint64_t seed) {
    std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
    const std::uint64_t start = 1 + seed;
    for (int k = 0; k < count; ++k)
        for (int a = 0; a < dim; ++a)
            pts[k][a] = radical_inverse(start + k, kPrimes[a % 12]);
    return pts;
}

} // namespace folab
