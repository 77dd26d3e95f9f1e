#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hyperdolphin/dataset.hpp"
#include "hyperdolphin/lsh.hpp"

namespace hyperdolphin {

/// Vertex of the d'-dimensional Hamming hypercube, packed into one word.
/// Bits at positions >= d' are always zero.
using Key = std::uint64_t;

/// Fair-coin map from canonical hash values to single bits, memoized per value.
/// The bit of a fresh value is a keyed mix of (stream seed, value), so every
/// caller that meets the same unseen value computes the same bit before the memo
/// records it; concurrent first sightings therefore cannot disagree. The memoed
/// entries are what the index file persists.
class BitAssignment {
public:
    BitAssignment() : BitAssignment(0) {}
    explicit BitAssignment(std::uint64_t stream_seed);

    /// Memoized lookup; assigns and records a fresh coin flip on first sight.
    /// Safe for concurrent use.
    bool bit_for(HashValue value) const;

    std::uint64_t stream_seed() const { return seed_; }
    std::size_t size() const;

    /// Entries ordered by hash value; serialization and tests want a canonical order.
    std::vector<std::pair<HashValue, bool>> entries_sorted() const;

    /// Load path: reinstates a persisted entry verbatim.
    void restore(HashValue value, bool bit);

private:
    std::uint64_t seed_ = 0;
    mutable std::unordered_map<HashValue, std::uint8_t> memo_;
    mutable std::unique_ptr<std::shared_mutex> mutex_;
};

enum class FamilyKind : std::uint8_t { RandomLine = 0, Hyperplane = 1, GridL1 = 2 };

/// Build-time description of the LSH family backing an index.
struct FamilySpec {
    FamilyKind kind = FamilyKind::RandomLine;
    double w = 2.0;       // line segment / grid cell width
    double mu = 0.0;      // line direction coordinate mean
    double sigma = 1.0;   // line direction coordinate stddev
    std::uint32_t k = 1;  // hyperplane / grid amplification

    Metric metric() const { return kind == FamilyKind::GridL1 ? Metric::L1 : Metric::L2; }

    bool operator==(const FamilySpec&) const = default;
};

/// Default hypercube dimension floor(log2 n), clamped to [1, 64]. Callers may
/// pass a smaller d' to build() to trade accuracy for space.
unsigned default_dprime(std::size_t n);

/// Linear-space index: d' independent (hash function, bit map) pairs project
/// each point to a d'-bit key, and buckets map keys to the ids living at that
/// hypercube vertex. The dataset itself is held by reference, never copied;
/// absent keys mean empty buckets.
class HypercubeIndex {
public:
    /// Deterministic given (dataset, d_prime, family, seed). The dataset must
    /// outlive the index.
    static HypercubeIndex build(const Dataset& dataset, unsigned d_prime,
                                const FamilySpec& family, std::uint64_t seed);

    /// Key of an arbitrary point. Hash values first seen here are assigned
    /// fresh coin flips and persist into the memo, so repeated calls agree.
    Key project(std::span<const double> p) const;

    /// Ids stored at a vertex; empty for unused vertices. The key must have no
    /// bits at positions >= d'.
    std::span<const std::uint32_t> bucket_of(Key key) const;

    unsigned d_prime() const { return d_prime_; }
    const FamilySpec& family_spec() const { return family_; }
    Metric metric() const { return family_.metric(); }
    const Dataset& dataset() const { return *dataset_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t bucket_count() const { return buckets_.size(); }
    const std::unordered_map<Key, std::vector<std::uint32_t>>& buckets() const {
        return buckets_;
    }
    const std::vector<Hasher>& hashers() const { return hashers_; }
    const std::vector<BitAssignment>& bit_maps() const { return bits_; }

    /// Index file: magic "HDLP", version, d', family tag and parameters,
    /// per-coordinate memos, buckets, dataset checksum. Little-endian
    /// throughout; entries are sorted so equal indices serialize to equal bytes.
    void save(std::ostream& out) const;
    void save(const std::string& path) const;

    /// Requires the very dataset the index was built on; the embedded checksum
    /// guards against mismatches.
    static HypercubeIndex load(std::istream& in, const Dataset& dataset);
    static HypercubeIndex load(const std::string& path, const Dataset& dataset);

    std::size_t serialized_bytes() const;

private:
    HypercubeIndex() = default;

    const Dataset* dataset_ = nullptr;
    unsigned d_prime_ = 0;
    FamilySpec family_{};
    std::uint64_t seed_ = 0;
    std::vector<Hasher> hashers_;
    std::vector<BitAssignment> bits_;
    std::unordered_map<Key, std::vector<std::uint32_t>> buckets_;
};

/// Metadata of a saved index, readable without the dataset.
struct IndexInfo {
    std::uint16_t version = 0;
    unsigned d_prime = 0;
    FamilySpec family{};
    std::size_t dim = 0;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::uint64_t memo_entries = 0;
    std::uint64_t bucket_count = 0;
    std::uint64_t dataset_checksum = 0;
    std::uint64_t file_bytes = 0;
};

IndexInfo read_index_info(const std::string& path);

const char* family_name(FamilyKind kind);

}  // namespace hyperdolphin
