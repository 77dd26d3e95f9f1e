#include "hyperdolphin/hypercube.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>

#include "hyperdolphin/errors.hpp"
#include "hyperdolphin/rng.hpp"

namespace hyperdolphin {

namespace {

constexpr char kMagic[4] = {'H', 'D', 'L', 'P'};
constexpr std::uint16_t kFormatVersion = 1;

// Domain tags separating the hasher and coin seed streams of one master seed.
constexpr std::uint64_t kHasherTag = 0x68647368;  // "hdsh"
constexpr std::uint64_t kCoinTag = 0x6864636e;    // "hdcn"

void write_bytes(std::ostream& out, const void* data, std::size_t len) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
}

void write_u8(std::ostream& out, std::uint8_t v) { write_bytes(out, &v, 1); }

void write_u16(std::ostream& out, std::uint16_t v) {
    unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    write_bytes(out, b, 2);
}

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    write_bytes(out, b, 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    write_bytes(out, b, 8);
}

void write_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, 8);
    write_u64(out, bits);
}

void read_bytes(std::istream& in, void* data, std::size_t len) {
    if (!in.read(static_cast<char*>(data), static_cast<std::streamsize>(len))) {
        throw FormatError("index file: truncated");
    }
}

std::uint8_t read_u8(std::istream& in) {
    std::uint8_t v;
    read_bytes(in, &v, 1);
    return v;
}

std::uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    read_bytes(in, b, 2);
    return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    read_bytes(in, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    read_bytes(in, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& in) {
    const std::uint64_t bits = read_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

void validate_family(const FamilySpec& family) {
    switch (family.kind) {
        case FamilyKind::RandomLine:
            if (!(family.w > 0.0)) throw ParameterError("FamilySpec: line width must be positive");
            if (!(family.sigma > 0.0)) throw ParameterError("FamilySpec: sigma must be positive");
            break;
        case FamilyKind::Hyperplane:
            if (family.k < 1 || family.k > 64) {
                throw ParameterError("FamilySpec: hyperplane k must lie in [1, 64]");
            }
            break;
        case FamilyKind::GridL1:
            if (family.k < 1) throw ParameterError("FamilySpec: grid k must be positive");
            if (!(family.w > 0.0)) throw ParameterError("FamilySpec: grid width must be positive");
            break;
    }
}

}  // namespace

BitAssignment::BitAssignment(std::uint64_t stream_seed)
    : seed_(stream_seed), mutex_(std::make_unique<std::shared_mutex>()) {}

bool BitAssignment::bit_for(HashValue value) const {
    {
        std::shared_lock lock(*mutex_);
        auto it = memo_.find(value);
        if (it != memo_.end()) return it->second != 0;
    }
    // Keyed coin: every caller derives the same bit for the same unseen value,
    // so racing first sightings insert identical entries.
    const bool bit = (splitmix64(seed_ ^ splitmix64(value)) & 1ULL) != 0;
    std::unique_lock lock(*mutex_);
    auto [it, inserted] = memo_.try_emplace(value, bit ? std::uint8_t{1} : std::uint8_t{0});
    (void)inserted;
    return it->second != 0;
}

std::size_t BitAssignment::size() const {
    std::shared_lock lock(*mutex_);
    return memo_.size();
}

std::vector<std::pair<HashValue, bool>> BitAssignment::entries_sorted() const {
    std::vector<std::pair<HashValue, bool>> out;
    {
        std::shared_lock lock(*mutex_);
        out.reserve(memo_.size());
        for (const auto& [value, bit] : memo_) out.emplace_back(value, bit != 0);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void BitAssignment::restore(HashValue value, bool bit) {
    std::unique_lock lock(*mutex_);
    memo_[value] = bit ? 1 : 0;
}

unsigned default_dprime(std::size_t n) {
    if (n < 2) throw ParameterError("default_dprime: need at least two points");
    const auto floor_log2 = static_cast<unsigned>(std::bit_width(n) - 1);
    return std::clamp(floor_log2, 1u, 64u);
}

HypercubeIndex HypercubeIndex::build(const Dataset& dataset, unsigned d_prime,
                                     const FamilySpec& family, std::uint64_t seed) {
    if (d_prime < 1 || d_prime > 64) {
        throw ParameterError("HypercubeIndex::build: d' must lie in [1, 64]");
    }
    if (dataset.size() > 0xffffffffULL) {
        throw ParameterError("HypercubeIndex::build: ids are stored as 32-bit integers");
    }
    validate_family(family);

    HypercubeIndex index;
    index.dataset_ = &dataset;
    index.d_prime_ = d_prime;
    index.family_ = family;
    index.seed_ = seed;
    index.hashers_.reserve(d_prime);
    index.bits_.reserve(d_prime);

    const std::size_t d = dataset.dim();
    for (unsigned i = 0; i < d_prime; ++i) {
        const std::uint64_t hseed = derive_seed(seed, kHasherTag, i);
        switch (family.kind) {
            case FamilyKind::RandomLine:
                index.hashers_.emplace_back(
                    sample_line_family(d, family.w, family.mu, family.sigma, hseed));
                break;
            case FamilyKind::Hyperplane:
                index.hashers_.emplace_back(sample_hyperplane_family(d, family.k, hseed));
                break;
            case FamilyKind::GridL1:
                index.hashers_.emplace_back(sample_grid_l1_family(d, family.k, family.w, hseed));
                break;
        }
        index.bits_.emplace_back(derive_seed(seed, kCoinTag, i));
    }

    for (std::uint32_t id = 0; id < dataset.size(); ++id) {
        index.buckets_[index.project(dataset.row(id))].push_back(id);
    }
    return index;
}

Key HypercubeIndex::project(std::span<const double> p) const {
    if (p.size() != dataset_->dim()) {
        throw ShapeError("HypercubeIndex::project: point dimension " + std::to_string(p.size()) +
                         " does not match dataset dimension " + std::to_string(dataset_->dim()));
    }
    Key key = 0;
    for (unsigned i = 0; i < d_prime_; ++i) {
        const HashValue value = eval_canonical(hashers_[i], p);
        if (bits_[i].bit_for(value)) key |= Key{1} << i;
    }
    return key;
}

std::span<const std::uint32_t> HypercubeIndex::bucket_of(Key key) const {
    if (d_prime_ < 64 && (key >> d_prime_) != 0) {
        throw ParameterError("HypercubeIndex::bucket_of: key has bits at positions >= d'");
    }
    auto it = buckets_.find(key);
    if (it == buckets_.end()) return {};
    return it->second;
}

void HypercubeIndex::save(std::ostream& out) const {
    write_bytes(out, kMagic, 4);
    write_u16(out, kFormatVersion);
    write_u16(out, static_cast<std::uint16_t>(d_prime_));
    write_u8(out, static_cast<std::uint8_t>(family_.kind));
    write_u8(out, family_.metric() == Metric::L2 ? 0 : 1);
    write_u32(out, static_cast<std::uint32_t>(dataset_->dim()));
    write_u32(out, static_cast<std::uint32_t>(dataset_->size()));
    write_u64(out, seed_);

    // Family parameter block: spec scalars, then each hasher's sampled state.
    write_f64(out, family_.w);
    write_f64(out, family_.mu);
    write_f64(out, family_.sigma);
    write_u32(out, family_.k);
    for (const Hasher& hasher : hashers_) {
        std::visit(
            [&](const auto& h) {
                using T = std::decay_t<decltype(h)>;
                if constexpr (std::is_same_v<T, RandomLineHash>) {
                    for (double x : h.direction) write_f64(out, x);
                    write_f64(out, h.offset);
                    write_f64(out, h.width);
                } else if constexpr (std::is_same_v<T, HyperplaneHash>) {
                    for (double x : h.directions) write_f64(out, x);
                } else {
                    for (double x : h.offsets) write_f64(out, x);
                    write_f64(out, h.width);
                }
            },
            hasher);
    }

    for (const BitAssignment& bits : bits_) write_u64(out, bits.stream_seed());
    for (const BitAssignment& bits : bits_) {
        const auto entries = bits.entries_sorted();
        write_u64(out, entries.size());
        for (const auto& [value, bit] : entries) {
            write_u64(out, value);
            write_u8(out, bit ? 1 : 0);
        }
    }

    std::vector<Key> keys;
    keys.reserve(buckets_.size());
    for (const auto& [key, ids] : buckets_) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    write_u64(out, keys.size());
    for (Key key : keys) {
        const auto& ids = buckets_.at(key);
        write_u64(out, key);
        write_u64(out, ids.size());
        for (std::uint32_t id : ids) write_u32(out, id);
    }

    write_u64(out, dataset_->checksum());
    if (!out) throw IoError("HypercubeIndex::save: write failed");
}

void HypercubeIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("HypercubeIndex::save: cannot open " + path + " for writing");
    save(out);
}

HypercubeIndex HypercubeIndex::load(std::istream& in, const Dataset& dataset) {
    char magic[4];
    read_bytes(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("index file: bad magic bytes");
    const std::uint16_t version = read_u16(in);
    if (version != kFormatVersion) {
        throw FormatError("index file: unsupported format version " + std::to_string(version));
    }
    const std::uint16_t d_prime = read_u16(in);
    if (d_prime < 1 || d_prime > 64) throw FormatError("index file: d' out of range");
    const std::uint8_t kind_tag = read_u8(in);
    if (kind_tag > 2) throw FormatError("index file: unknown family tag");
    read_u8(in);  // metric, implied by the family
    const std::uint32_t d = read_u32(in);
    const std::uint32_t n = read_u32(in);
    if (d != dataset.dim() || n != dataset.size()) {
        throw FormatError("index file: dataset shape mismatch");
    }
    const std::uint64_t seed = read_u64(in);

    HypercubeIndex index;
    index.dataset_ = &dataset;
    index.d_prime_ = d_prime;
    index.seed_ = seed;
    index.family_.kind = static_cast<FamilyKind>(kind_tag);
    index.family_.w = read_f64(in);
    index.family_.mu = read_f64(in);
    index.family_.sigma = read_f64(in);
    index.family_.k = read_u32(in);
    validate_family(index.family_);

    for (unsigned i = 0; i < d_prime; ++i) {
        switch (index.family_.kind) {
            case FamilyKind::RandomLine: {
                RandomLineHash h;
                h.direction.resize(d);
                for (double& x : h.direction) x = read_f64(in);
                h.offset = read_f64(in);
                h.width = read_f64(in);
                index.hashers_.emplace_back(std::move(h));
                break;
            }
            case FamilyKind::Hyperplane: {
                HyperplaneHash h;
                h.dim = d;
                h.amplification = index.family_.k;
                h.directions.resize(static_cast<std::size_t>(index.family_.k) * d);
                for (double& x : h.directions) x = read_f64(in);
                index.hashers_.emplace_back(std::move(h));
                break;
            }
            case FamilyKind::GridL1: {
                GridL1Hash h;
                h.dim = d;
                h.amplification = index.family_.k;
                h.offsets.resize(static_cast<std::size_t>(index.family_.k) * d);
                for (double& x : h.offsets) x = read_f64(in);
                h.width = read_f64(in);
                index.hashers_.emplace_back(std::move(h));
                break;
            }
        }
    }

    index.bits_.reserve(d_prime);
    for (unsigned i = 0; i < d_prime; ++i) {
        index.bits_.emplace_back(read_u64(in));
    }
    for (unsigned i = 0; i < d_prime; ++i) {
        const std::uint64_t count = read_u64(in);
        for (std::uint64_t j = 0; j < count; ++j) {
            const HashValue value = read_u64(in);
            const std::uint8_t bit = read_u8(in);
            if (bit > 1) throw FormatError("index file: memo bit out of range");
            index.bits_[i].restore(value, bit != 0);
        }
    }

    const std::uint64_t bucket_count = read_u64(in);
    std::uint64_t total_ids = 0;
    for (std::uint64_t b = 0; b < bucket_count; ++b) {
        const Key key = read_u64(in);
        if (d_prime < 64 && (key >> d_prime) != 0) {
            throw FormatError("index file: bucket key has bits at positions >= d'");
        }
        const std::uint64_t count = read_u64(in);
        auto& ids = index.buckets_[key];
        ids.reserve(count);
        for (std::uint64_t j = 0; j < count; ++j) {
            const std::uint32_t id = read_u32(in);
            if (id >= n) throw FormatError("index file: bucket id out of range");
            ids.push_back(id);
        }
        total_ids += count;
    }
    if (total_ids != n) throw FormatError("index file: buckets do not partition the id set");

    const std::uint64_t checksum = read_u64(in);
    if (checksum != dataset.checksum()) {
        throw FormatError("index file: dataset checksum mismatch");
    }
    return index;
}

HypercubeIndex HypercubeIndex::load(const std::string& path, const Dataset& dataset) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("HypercubeIndex::load: cannot open " + path);
    HypercubeIndex index = load(in, dataset);
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("index file: trailing bytes after checksum");
    }
    return index;
}

std::size_t HypercubeIndex::serialized_bytes() const {
    std::ostringstream out(std::ios::binary);
    save(out);
    return out.str().size();
}

const char* family_name(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::RandomLine: return "random_line";
        case FamilyKind::Hyperplane: return "hyperplane";
        case FamilyKind::GridL1: return "grid_l1";
    }
    return "unknown";
}

IndexInfo read_index_info(const std::string& path) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IoError("read_index_info: cannot open " + path);
    IndexInfo info;
    info.file_bytes = static_cast<std::uint64_t>(in.tellg());
    in.seekg(0);

    char magic[4];
    read_bytes(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw FormatError("index file: bad magic bytes");
    info.version = read_u16(in);
    if (info.version != kFormatVersion) {
        throw FormatError("index file: unsupported format version " + std::to_string(info.version));
    }
    info.d_prime = read_u16(in);
    const std::uint8_t kind_tag = read_u8(in);
    if (kind_tag > 2) throw FormatError("index file: unknown family tag");
    info.family.kind = static_cast<FamilyKind>(kind_tag);
    read_u8(in);  // metric
    info.dim = read_u32(in);
    info.n = read_u32(in);
    info.seed = read_u64(in);
    info.family.w = read_f64(in);
    info.family.mu = read_f64(in);
    info.family.sigma = read_f64(in);
    info.family.k = read_u32(in);

    std::size_t hasher_doubles = 0;
    switch (info.family.kind) {
        case FamilyKind::RandomLine: hasher_doubles = info.dim + 2; break;
        case FamilyKind::Hyperplane: hasher_doubles = static_cast<std::size_t>(info.family.k) * info.dim; break;
        case FamilyKind::GridL1: hasher_doubles = static_cast<std::size_t>(info.family.k) * info.dim + 1; break;
    }
    in.seekg(static_cast<std::streamoff>(info.d_prime * (hasher_doubles * 8 + 8)), std::ios::cur);
    if (!in) throw FormatError("index file: truncated");

    for (unsigned i = 0; i < info.d_prime; ++i) {
        const std::uint64_t count = read_u64(in);
        info.memo_entries += count;
        in.seekg(static_cast<std::streamoff>(count * 9), std::ios::cur);
        if (!in) throw FormatError("index file: truncated");
    }
    info.bucket_count = read_u64(in);
    for (std::uint64_t b = 0; b < info.bucket_count; ++b) {
        read_u64(in);
        const std::uint64_t count = read_u64(in);
        in.seekg(static_cast<std::streamoff>(count * 4), std::ios::cur);
        if (!in) throw FormatError("index file: truncated");
    }
    info.dataset_checksum = read_u64(in);
    return info;
}

}  // namespace hyperdolphin
