#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace hierlag {

/// Reproducible random source: std::mt19937_64 (sequence fixed by the C++
/// standard) with Gaussian draws by inverse-CDF transform of open-interval
/// uniforms. std::normal_distribution is avoided because its algorithm is
/// implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream derived from (seed, stream) through SplitMix64.
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1) with 53 bits of resolution.
    double uniform();

    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    /// Uniform integer in [0, n) by rejection sampling; n must be > 0.
    std::size_t uniform_index(std::size_t n);

private:
    std::mt19937_64 engine_;
};

/// Inverse of the standard normal CDF on (0, 1).
double standard_normal_quantile(double p);

/// SplitMix64 finaliser; used to decorrelate derived seeds.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace hierlag
