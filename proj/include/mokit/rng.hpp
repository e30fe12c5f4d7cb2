#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace mokit {

/// Seeded random streams. Stream k of seed s is std::mt19937_64 seeded with
/// splitmix64(s + 0x9E3779B97F4A7C15 * (k + 1)); doubles take the top 53 bits.
/// Reports record this contract under "prng" so runs replay across languages.
class Rng {
public:
    static constexpr std::string_view kAlgorithm =
        "mt19937_64 seeded by splitmix64(seed + 0x9E3779B97F4A7C15*(stream+1)); double = (x >> 11) * 2^-53";

    Rng(std::uint64_t seed, std::uint64_t stream) : eng_(splitmix64(seed + 0x9E3779B97F4A7C15ULL * (stream + 1))) {}

    static std::uint64_t splitmix64(std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next() { return eng_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Log-uniform in [lo, hi], lo > 0.
    double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
    std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n; }

private:
    std::mt19937_64 eng_;
};

}  // namespace mokit
