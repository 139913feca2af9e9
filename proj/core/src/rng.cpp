#include "hierlag/rng.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>

#include "hierlag/errors.hpp"

namespace hierlag {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ULL))) {}

double Rng::uniform() {
    // (k + 0.5) / 2^53 never hits 0 or 1.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double Rng::normal() { return standard_normal_quantile(uniform()); }

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) {
        throw Error(Errc::InvalidArgument, "uniform_index: empty range");
    }
    const std::uint64_t range = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % range;
    std::uint64_t x = 0;
    do {
        x = engine_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % range);
}

double standard_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw Error(Errc::InvalidArgument, "normal quantile needs p in (0, 1)");
    }
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

} // namespace hierlag
