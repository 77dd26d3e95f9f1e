#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hyperdolphin {

/// splitmix64 step applied to a single word; doubles as a standalone integer mixer.
/// Constants are Steele et al.'s: increment 0x9e3779b97f4a7c15, multipliers
/// 0xbf58476d1ce4e5b9 and 0x94d049bb133111eb.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from a master seed, a domain tag and an index.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag,
                                           std::uint64_t index) {
    return splitmix64(splitmix64(master ^ splitmix64(tag)) ^ index);
}

/// Deterministic generator: identical seeds give identical draws on every
/// platform, which keeps generated datasets and sampled hash functions
/// bit-reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t x = state_;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    /// Uniform in [0, 1) with 53 random mantissa bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) {
        double v = lo + (hi - lo) * uniform01();
        if (v >= hi) v = std::nextafter(hi, lo);  // rounding can land exactly on hi
        return v;
    }

    /// Index uniform in [0, n).
    std::uint64_t uniform_index(std::uint64_t n) { return next_u64() % n; }

    /// Box-Muller transform; the spare draw is cached.
    double normal(double mu, double sigma) {
        if (has_spare_) {
            has_spare_ = false;
            return mu + sigma * spare_;
        }
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
        const double u2 = uniform01();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = mag * std::sin(ang);
        has_spare_ = true;
        return mu + sigma * mag * std::cos(ang);
    }

    bool coin() { return (next_u64() & 1ULL) != 0; }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace hyperdolphin
