#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hyperdolphin {

/// Element kinds of the vecs file family: fvecs, bvecs, ivecs.
enum class VecKind { Float32, Uint8, Int32 };

/// Dense row-major point set. Coordinates live as doubles in memory; the vecs
/// formats keep 32-bit elements on disk and are widened on read.
class Dataset {
public:
    Dataset(std::size_t n, std::size_t d, std::vector<double> points);

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }
    std::span<const double> row(std::size_t i) const { return {points_.data() + i * d_, d_}; }
    const std::vector<double>& points() const { return points_; }

    /// 64-bit FNV-1a over the little-endian bytes of every coordinate, row-major.
    /// Index files embed this value to refuse loads against a different dataset.
    std::uint64_t checksum() const { return checksum_; }

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> points_;
    std::uint64_t checksum_ = 0;
};

struct QuerySet {
    Dataset queries;
    /// 1 = the planted displacement has l2 norm <= 1. Present only for
    /// synthetically generated query sets.
    std::optional<std::vector<std::uint8_t>> labels;
};

/// Reads a vecs file: records of (dimension as 4-byte little-endian signed int,
/// then dimension elements of the given kind, little-endian). All records must
/// share one dimension; errors report the byte offset of the defect.
Dataset read_vecs(const std::string& path, VecKind kind);

/// Inverse of read_vecs. Uint8/Int32 reject values that are not exactly
/// representable; Float32 rounds to the nearest 32-bit float.
void write_vecs(const Dataset& dataset, const std::string& path, VecKind kind);

/// Points uniform on the unit sphere of R^d (normalized Gaussians), plus
/// i.i.d. Normal(0, noise_sigma^2) per coordinate.
Dataset gen_sphere(std::size_t n, std::size_t d, double noise_sigma, std::uint64_t seed);

/// Klein bottle surface embedded in the first four coordinates of R^d and
/// zero-padded, plus per-coordinate Gaussian noise. The embedding is the
/// half-twist tube
///   ((R + r cos v) cos u, (R + r cos v) sin u, r sin v cos(u/2), r sin v sin(u/2))
/// over (u, v) uniform on [0, 2pi)^2, with radii R = 2, r = 1 fixed below.
Dataset gen_klein(std::size_t n, std::size_t d, double noise_sigma, std::uint64_t seed);

inline constexpr double kKleinMajorRadius = 2.0;
inline constexpr double kKleinMinorRadius = 1.0;

/// Each query is a uniformly picked dataset point plus a Normal(0, near_sigma^2)
/// displacement, resampled until its norm class (l2 norm <= 1 vs > 1) matches an
/// independent Bernoulli(p_near) draw. Labels record the drawn class, so the
/// fraction of near queries is p_near in expectation and every near label is
/// witnessed by the planted source point.
QuerySet gen_queries(const Dataset& dataset, std::size_t m, double p_near,
                     double near_sigma, std::uint64_t seed);

}  // namespace hyperdolphin
