#include "hyperdolphin/dataset.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "hyperdolphin/errors.hpp"
#include "hyperdolphin/rng.hpp"

namespace hyperdolphin {

namespace {

std::uint64_t fnv1a64_append(std::uint64_t h, const unsigned char* bytes, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t checksum_points(const std::vector<double>& points) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    unsigned char buf[8];
    for (double x : points) {
        std::uint64_t bits;
        std::memcpy(&bits, &x, 8);
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>(bits >> (8 * b));
        h = fnv1a64_append(h, buf, 8);
    }
    return h;
}

std::size_t element_size(VecKind kind) {
    switch (kind) {
        case VecKind::Float32: return 4;
        case VecKind::Uint8: return 1;
        case VecKind::Int32: return 4;
    }
    return 4;
}

std::int32_t le32_to_int(const unsigned char* b) {
    const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                            (static_cast<std::uint32_t>(b[1]) << 8) |
                            (static_cast<std::uint32_t>(b[2]) << 16) |
                            (static_cast<std::uint32_t>(b[3]) << 24);
    std::int32_t v;
    std::memcpy(&v, &u, 4);
    return v;
}

float le32_to_float(const unsigned char* b) {
    const std::uint32_t u = static_cast<std::uint32_t>(b[0]) |
                            (static_cast<std::uint32_t>(b[1]) << 8) |
                            (static_cast<std::uint32_t>(b[2]) << 16) |
                            (static_cast<std::uint32_t>(b[3]) << 24);
    float f;
    std::memcpy(&f, &u, 4);
    return f;
}

void int_to_le32(std::int32_t v, unsigned char* b) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    b[0] = static_cast<unsigned char>(u);
    b[1] = static_cast<unsigned char>(u >> 8);
    b[2] = static_cast<unsigned char>(u >> 16);
    b[3] = static_cast<unsigned char>(u >> 24);
}

void float_to_le32(float f, unsigned char* b) {
    std::uint32_t u;
    std::memcpy(&u, &f, 4);
    b[0] = static_cast<unsigned char>(u);
    b[1] = static_cast<unsigned char>(u >> 8);
    b[2] = static_cast<unsigned char>(u >> 16);
    b[3] = static_cast<unsigned char>(u >> 24);
}

[[noreturn]] void format_fail(const std::string& path, std::size_t offset, const std::string& what) {
    throw FormatError(path + ": " + what + " at byte offset " + std::to_string(offset));
}

}  // namespace

Dataset::Dataset(std::size_t n, std::size_t d, std::vector<double> points)
    : n_(n), d_(d), points_(std::move(points)) {
    if (n_ < 1) throw ParameterError("Dataset: need at least one point");
    if (d_ < 1) throw ParameterError("Dataset: dimension must be positive");
    if (points_.size() != n_ * d_) {
        throw ShapeError("Dataset: expected " + std::to_string(n_ * d_) + " coordinates, got " +
                         std::to_string(points_.size()));
    }
    for (double x : points_) {
        if (!std::isfinite(x)) throw ParameterError("Dataset: coordinates must be finite");
    }
    checksum_ = checksum_points(points_);
}

Dataset read_vecs(const std::string& path, VecKind kind) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("read_vecs: cannot open " + path);

    const std::size_t esize = element_size(kind);
    std::vector<double> values;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t offset = 0;
    unsigned char head[4];
    std::vector<unsigned char> payload;

    while (in.read(reinterpret_cast<char*>(head), 4)) {
        const std::int32_t raw_d = le32_to_int(head);
        if (raw_d <= 0) format_fail(path, offset, "non-positive record dimension");
        const auto d = static_cast<std::size_t>(raw_d);
        if (n == 0) {
            dim = d;
        } else if (d != dim) {
            format_fail(path, offset,
                        "record dimension " + std::to_string(d) + " differs from first record's " +
                            std::to_string(dim));
        }
        offset += 4;
        payload.resize(d * esize);
        if (!in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()))) {
            format_fail(path, offset + static_cast<std::size_t>(in.gcount()), "truncated record payload");
        }
        for (std::size_t i = 0; i < d; ++i) {
            double v = 0.0;
            switch (kind) {
                case VecKind::Float32: v = static_cast<double>(le32_to_float(payload.data() + 4 * i)); break;
                case VecKind::Uint8: v = static_cast<double>(payload[i]); break;
                case VecKind::Int32: v = static_cast<double>(le32_to_int(payload.data() + 4 * i)); break;
            }
            if (!std::isfinite(v)) format_fail(path, offset + esize * i, "non-finite element");
            values.push_back(v);
        }
        offset += payload.size();
        ++n;
    }
    if (in.gcount() != 0) format_fail(path, offset, "truncated record header");
    if (n == 0) format_fail(path, 0, "file holds no records");
    return Dataset(n, dim, std::move(values));
}

void write_vecs(const Dataset& dataset, const std::string& path, VecKind kind) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("write_vecs: cannot open " + path + " for writing");

    const std::size_t d = dataset.dim();
    std::vector<unsigned char> record(4 + d * element_size(kind));
    int_to_le32(static_cast<std::int32_t>(d), record.data());

    for (std::size_t i = 0; i < dataset.size(); ++i) {
        auto row = dataset.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double v = row[j];
            unsigned char* slot = record.data() + 4 + j * element_size(kind);
            switch (kind) {
                case VecKind::Float32:
                    float_to_le32(static_cast<float>(v), slot);
                    break;
                case VecKind::Uint8:
                    if (v != std::floor(v) || v < 0.0 || v > 255.0) {
                        throw ParameterError("write_vecs: value " + std::to_string(v) +
                                             " not representable as uint8");
                    }
                    *slot = static_cast<unsigned char>(v);
                    break;
                case VecKind::Int32:
                    if (v != std::floor(v) || v < -2147483648.0 || v > 2147483647.0) {
                        throw ParameterError("write_vecs: value " + std::to_string(v) +
                                             " not representable as int32");
                    }
                    int_to_le32(static_cast<std::int32_t>(v), slot);
                    break;
            }
        }
        out.write(reinterpret_cast<const char*>(record.data()), static_cast<std::streamsize>(record.size()));
    }
    if (!out) throw IoError("write_vecs: write to " + path + " failed");
}

Dataset gen_sphere(std::size_t n, std::size_t d, double noise_sigma, std::uint64_t seed) {
    if (n < 1) throw ParameterError("gen_sphere: n must be positive");
    if (d < 2) throw ParameterError("gen_sphere: d must be at least 2");
    if (noise_sigma < 0.0) throw ParameterError("gen_sphere: noise_sigma must be non-negative");

    Rng rng(seed);
    std::vector<double> pts(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = pts.data() + i * d;
        double norm2 = 0.0;
        do {
            norm2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                row[j] = rng.normal(0.0, 1.0);
                norm2 += row[j] * row[j];
            }
        } while (norm2 < 1e-24);
        const double inv = 1.0 / std::sqrt(norm2);
        for (std::size_t j = 0; j < d; ++j) row[j] *= inv;
        if (noise_sigma > 0.0) {
            for (std::size_t j = 0; j < d; ++j) row[j] += rng.normal(0.0, noise_sigma);
        }
    }
    return Dataset(n, d, std::move(pts));
}

Dataset gen_klein(std::size_t n, std::size_t d, double noise_sigma, std::uint64_t seed) {
    if (n < 1) throw ParameterError("gen_klein: n must be positive");
    if (d < 4) throw ParameterError("gen_klein: the embedding needs d >= 4");
    if (noise_sigma < 0.0) throw ParameterError("gen_klein: noise_sigma must be non-negative");

    constexpr double R = kKleinMajorRadius;
    constexpr double r = kKleinMinorRadius;
    Rng rng(seed);
    std::vector<double> pts(n * d, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = pts.data() + i * d;
        const double u = 2.0 * std::numbers::pi * rng.uniform01();
        const double v = 2.0 * std::numbers::pi * rng.uniform01();
        const double ring = R + r * std::cos(v);
        row[0] = ring * std::cos(u);
        row[1] = ring * std::sin(u);
        row[2] = r * std::sin(v) * std::cos(u / 2.0);
        row[3] = r * std::sin(v) * std::sin(u / 2.0);
        if (noise_sigma > 0.0) {
            for (std::size_t j = 0; j < d; ++j) row[j] += rng.normal(0.0, noise_sigma);
        }
    }
    return Dataset(n, d, std::move(pts));
}

QuerySet gen_queries(const Dataset& dataset, std::size_t m, double p_near, double near_sigma,
                     std::uint64_t seed) {
    if (m < 1) throw ParameterError("gen_queries: m must be positive");
    if (!(p_near >= 0.0 && p_near <= 1.0)) {
        throw ParameterError("gen_queries: p_near must lie in [0, 1]");
    }
    if (near_sigma < 0.0) throw ParameterError("gen_queries: near_sigma must be non-negative");

    const std::size_t d = dataset.dim();
    Rng rng(seed);
    std::vector<double> queries(m * d);
    std::vector<std::uint8_t> labels(m);
    std::vector<double> disp(d);

    constexpr int kMaxAttempts = 100000;
    for (std::size_t i = 0; i < m; ++i) {
        const auto source = static_cast<std::size_t>(rng.uniform_index(dataset.size()));
        const bool want_near = rng.uniform01() < p_near;
        bool matched = false;
        for (int attempt = 0; attempt < kMaxAttempts && !matched; ++attempt) {
            double norm2 = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                disp[j] = rng.normal(0.0, near_sigma);
                norm2 += disp[j] * disp[j];
            }
            matched = (norm2 <= 1.0) == want_near;
        }
        if (!matched) {
            throw ParameterError(
                "gen_queries: displacement class unreachable; adjust near_sigma (norms of "
                "Normal(0, near_sigma^2)^d rarely cross 1)");
        }
        auto src = dataset.row(source);
        for (std::size_t j = 0; j < d; ++j) queries[i * d + j] = src[j] + disp[j];
        labels[i] = want_near ? 1 : 0;
    }
    return QuerySet{Dataset(m, d, std::move(queries)), std::move(labels)};
}

}  // namespace hyperdolphin
