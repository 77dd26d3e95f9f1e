#include "hyperdolphin/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "hyperdolphin/errors.hpp"
#include "hyperdolphin/rng.hpp"

namespace hyperdolphin {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

void require_dim(std::size_t expected, std::size_t got, const char* what) {
    if (expected != got) {
        throw ShapeError(std::string(what) + ": point has dimension " + std::to_string(got) +
                         ", hash expects " + std::to_string(expected));
    }
}

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

}  // namespace

std::int64_t RandomLineHash::eval(std::span<const double> p) const {
    require_dim(direction.size(), p.size(), "RandomLineHash::eval");
    return static_cast<std::int64_t>(std::floor((dot(p, direction) + offset) / width));
}

HashValue RandomLineHash::canonical(std::span<const double> p) const {
    return static_cast<HashValue>(eval(p));
}

HashValue HyperplaneHash::eval(std::span<const double> p) const {
    require_dim(dim, p.size(), "HyperplaneHash::eval");
    double norm2 = 0.0;
    for (double x : p) norm2 += x * x;
    if (std::abs(std::sqrt(norm2) - 1.0) > 1e-6) {
        throw ParameterError("HyperplaneHash::eval: input must lie on the unit sphere");
    }
    HashValue pattern = 0;
    for (std::uint32_t j = 0; j < amplification; ++j) {
        std::span<const double> row{directions.data() + static_cast<std::size_t>(j) * dim, dim};
        if (dot(p, row) >= 0.0) pattern |= HashValue{1} << j;
    }
    return pattern;
}

std::vector<std::int64_t> GridL1Hash::cells(std::span<const double> p) const {
    require_dim(dim, p.size(), "GridL1Hash::cells");
    std::vector<std::int64_t> out(static_cast<std::size_t>(amplification) * dim);
    const double* t = offsets.data();
    for (std::size_t i = 0; i < out.size(); ++i, ++t) {
        out[i] = static_cast<std::int64_t>(std::floor((p[i % dim] + *t) / width));
    }
    return out;
}

HashValue GridL1Hash::eval(std::span<const double> p) const {
    require_dim(dim, p.size(), "GridL1Hash::eval");
    std::uint64_t h = kFnvOffset;
    const double* t = offsets.data();
    for (std::uint32_t j = 0; j < amplification; ++j) {
        for (std::size_t i = 0; i < dim; ++i, ++t) {
            const auto cell = static_cast<std::int64_t>(std::floor((p[i] + *t) / width));
            h = (h ^ splitmix64(static_cast<std::uint64_t>(cell))) * kFnvPrime;
        }
    }
    return h;
}

RandomLineHash sample_line_family(std::size_t d, double w, double mu, double sigma,
                                  std::uint64_t seed) {
    if (d < 1) throw ParameterError("sample_line_family: dimension must be positive");
    if (!(w > 0.0)) throw ParameterError("sample_line_family: width must be positive");
    if (!(sigma > 0.0)) throw ParameterError("sample_line_family: sigma must be positive");
    Rng rng(seed);
    RandomLineHash h;
    h.width = w;
    h.direction.resize(d);
    for (double& x : h.direction) x = rng.normal(mu, sigma);
    h.offset = rng.uniform(0.0, w);
    return h;
}

HyperplaneHash sample_hyperplane_family(std::size_t d, std::uint32_t k, std::uint64_t seed) {
    if (d < 1) throw ParameterError("sample_hyperplane_family: dimension must be positive");
    if (k < 1 || k > 64) throw ParameterError("sample_hyperplane_family: k must lie in [1, 64]");
    Rng rng(seed);
    HyperplaneHash h;
    h.dim = d;
    h.amplification = k;
    h.directions.resize(static_cast<std::size_t>(k) * d);
    for (std::uint32_t j = 0; j < k; ++j) {
        double* row = h.directions.data() + static_cast<std::size_t>(j) * d;
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                row[i] = rng.normal(0.0, 1.0);
                norm2 += row[i] * row[i];
            }
        } while (norm2 < 1e-24);  // guards the normalization below
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t i = 0; i < d; ++i) row[i] *= inv;
    }
    return h;
}

GridL1Hash sample_grid_l1_family(std::size_t d, std::uint32_t k, double w, std::uint64_t seed) {
    if (d < 1) throw ParameterError("sample_grid_l1_family: dimension must be positive");
    if (k < 1) throw ParameterError("sample_grid_l1_family: k must be positive");
    if (!(w > 0.0)) throw ParameterError("sample_grid_l1_family: width must be positive");
    Rng rng(seed);
    GridL1Hash h;
    h.dim = d;
    h.amplification = k;
    h.width = w;
    h.offsets.resize(static_cast<std::size_t>(k) * d);
    for (double& t : h.offsets) t = rng.uniform(0.0, w);
    return h;
}

double collision_prob_l2(double eta, double w) {
    if (!(eta > 0.0)) throw ParameterError("collision_prob_l2: eta must be positive");
    if (!(w > 0.0)) throw ParameterError("collision_prob_l2: w must be positive");
    const double ratio = w / eta;
    const double value = std::erf(ratio / std::numbers::sqrt2) -
                         std::sqrt(2.0 / std::numbers::pi) / ratio *
                             (1.0 - std::exp(-0.5 * ratio * ratio));
    return std::clamp(value, 0.0, 1.0);
}

double delta_exponent(double p1, double p2) {
    if (!(p2 >= 0.0) || !(p1 <= 1.0) || !(p1 > p2)) {
        throw ParameterError("delta_exponent: requires 0 <= p2 < p1 <= 1");
    }
    const double gap = p1 - p2;
    return gap * gap / (1.0 - p2) * std::numbers::log2e / 4.0;
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("binary_entropy: x must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

SensitivityParams::SensitivityParams(double p1, double p2, double r1, double r2)
    : p1(p1), p2(p2), r1(r1), r2(r2) {
    if (!(p2 >= 0.0 && p1 <= 1.0 && p1 > p2)) {
        throw ParameterError("SensitivityParams: requires 0 <= p2 < p1 <= 1");
    }
    if (!(r1 > 0.0 && r1 < r2)) {
        throw ParameterError("SensitivityParams: requires 0 < r1 < r2");
    }
}

SensitivityParams line_sensitivity(double r, double c, double w) {
    if (!(r > 0.0)) throw ParameterError("line_sensitivity: r must be positive");
    if (!(c > 1.0)) throw ParameterError("line_sensitivity: c must exceed 1");
    return {collision_prob_l2(r, w), collision_prob_l2(c * r, w), r, c * r};
}

HashValue eval_canonical(const Hasher& hasher, std::span<const double> p) {
    return std::visit(
        [&](const auto& h) -> HashValue {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, RandomLineHash>) {
                return h.canonical(p);
            } else {
                return h.eval(p);
            }
        },
        hasher);
}

std::size_t hasher_dim(const Hasher& hasher) {
    return std::visit(
        [](const auto& h) -> std::size_t {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, RandomLineHash>) {
                return h.direction.size();
            } else {
                return h.dim;
            }
        },
        hasher);
}

}  // namespace hyperdolphin
