#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace hyperdolphin {

/// Canonical integer form of a hash value, the key type fed to the per-coordinate
/// bit maps of the hypercube index.
using HashValue = std::uint64_t;

enum class Metric { L2, L1 };

/// Projection onto a random line chopped into segments of width w:
///   h(p) = floor((<p, direction> + offset) / width).
/// Direction coordinates are sampled Normal(mu, sigma^2); offset is uniform in
/// [0, width).
struct RandomLineHash {
    std::vector<double> direction;
    double offset = 0.0;
    double width = 1.0;

    std::int64_t eval(std::span<const double> p) const;
    HashValue canonical(std::span<const double> p) const;

    bool operator==(const RandomLineHash&) const = default;
};

/// Sign pattern of k random hyperplanes. Inputs must lie on the unit sphere
/// (within 1e-6); bit j of the pattern is 1 iff <p, direction_j> >= 0, so a
/// dot product of exactly zero resolves to 1.
struct HyperplaneHash {
    std::size_t dim = 0;
    std::uint32_t amplification = 1;  // k, at most 64 so patterns pack into one word
    std::vector<double> directions;   // k unit vectors of length dim, row-major

    HashValue eval(std::span<const double> p) const;

    bool operator==(const HyperplaneHash&) const = default;
};

/// k concatenated randomly shifted grids for the l1 metric. The k*d cell indices
/// are reduced to one canonical integer by a fixed 64-bit polynomial mix (FNV-1a
/// over splitmix64-mixed cells); equal tuples always map to equal integers, and
/// collisions between distinct tuples are tolerated downstream.
struct GridL1Hash {
    std::size_t dim = 0;
    std::uint32_t amplification = 1;  // k
    double width = 1.0;               // w = alpha * r
    std::vector<double> offsets;      // k * dim shifts, each in [0, width)

    std::vector<std::int64_t> cells(std::span<const double> p) const;
    HashValue eval(std::span<const double> p) const;

    bool operator==(const GridL1Hash&) const = default;
};

RandomLineHash sample_line_family(std::size_t d, double w, double mu, double sigma,
                                  std::uint64_t seed);
HyperplaneHash sample_hyperplane_family(std::size_t d, std::uint32_t k, std::uint64_t seed);
GridL1Hash sample_grid_l1_family(std::size_t d, std::uint32_t k, double w, std::uint64_t seed);

/// Collision probability of the random-line family for points at l2 distance eta:
///   alpha(eta, w) = erf(w / (sqrt(2) eta))
///                 - sqrt(2/pi) (eta / w) (1 - exp(-w^2 / (2 eta^2))),
/// clamped to [0, 1]. Depends only on w/eta, so it is scale invariant. erf is
/// the <cmath> standard facility.
double collision_prob_l2(double eta, double w);

/// Exponent delta(p1, p2) = (p1 - p2)^2 / (1 - p2) * log2(e) / 4 governing the
/// n^(1-delta) candidate bound of the hypercube search. Logs are base 2.
double delta_exponent(double p1, double p2);

/// H(x) = -x log2(x) - (1-x) log2(1-x), with H(0) = H(1) = 0. Bounds the
/// Hamming-ball enumeration cost as 2^(d' H((1-p1)/2)).
double binary_entropy(double x);

/// Collision probabilities p1 at distance r1 and p2 at distance r2 >= r1 of some
/// family. Construction enforces 0 <= p2 < p1 <= 1 and 0 < r1 < r2.
struct SensitivityParams {
    double p1;
    double p2;
    double r1;
    double r2;

    SensitivityParams(double p1, double p2, double r1, double r2);
};

/// p1/p2 of the random-line family at distances r and c*r for segment width w.
SensitivityParams line_sensitivity(double r, double c, double w);

using Hasher = std::variant<RandomLineHash, HyperplaneHash, GridL1Hash>;

HashValue eval_canonical(const Hasher& hasher, std::span<const double> p);
std::size_t hasher_dim(const Hasher& hasher);

}  // namespace hyperdolphin
