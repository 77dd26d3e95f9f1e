#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "hyperdolphin/dataset.hpp"
#include "hyperdolphin/errors.hpp"
#include "hyperdolphin/hypercube.hpp"
#include "hyperdolphin/rng.hpp"
#include "support/oracles.hpp"

using namespace hyperdolphin;

namespace {

struct TempFile {
    explicit TempFile(const std::string& name)
        : path((std::filesystem::temp_directory_path() / name).string()) {}
    ~TempFile() { std::remove(path.c_str()); }
    std::string path;
};

std::size_t total_ids(const HypercubeIndex& index) {
    std::size_t total = 0;
    for (const auto& [key, ids] : index.buckets()) total += ids.size();
    return total;
}

}  // namespace

TEST_CASE("default_dprime") {
    CHECK(default_dprime(1024) == 10);
    CHECK(default_dprime(1000000) == 19);
    CHECK(default_dprime(2) == 1);
    CHECK(default_dprime(3) == 1);
    CHECK_THROWS_AS(default_dprime(1), ParameterError);
}

TEST_CASE("bit assignment memoizes fair coin flips") {
    BitAssignment bits(42);

    SUBCASE("lookups are stable") {
        for (HashValue v = 0; v < 100; ++v) {
            const bool first = bits.bit_for(v);
            CHECK(bits.bit_for(v) == first);
        }
        CHECK(bits.size() == 100);
    }

    SUBCASE("fresh values are fair") {
        std::size_t ones = 0;
        const std::size_t trials = 10000;
        for (HashValue v = 0; v < trials; ++v) {
            if (bits.bit_for(v * 2654435761ULL + 17)) ++ones;
        }
        const double frac = static_cast<double>(ones) / static_cast<double>(trials);
        const double se = 0.5 / std::sqrt(static_cast<double>(trials));
        CHECK(std::abs(frac - 0.5) < 4.0 * se);
    }

    SUBCASE("different streams disagree somewhere") {
        BitAssignment other(43);
        bool differs = false;
        for (HashValue v = 0; v < 64; ++v) {
            if (bits.bit_for(v) != other.bit_for(v)) differs = true;
        }
        CHECK(differs);
    }
}

TEST_CASE("build places every id in exactly one bucket") {
    SUBCASE("single point") {
        const Dataset ds(1, 4, {0.1, 0.2, 0.3, 0.4});
        const auto index = HypercubeIndex::build(ds, 1, FamilySpec{}, 3);
        CHECK(index.bucket_count() == 1);
        CHECK(total_ids(index) == 1);
    }

    SUBCASE("duplicate points share a bucket") {
        std::vector<double> pts{1.0, 2.0, 1.0, 2.0, -3.0, 0.5};
        const Dataset ds(3, 2, std::move(pts));
        const auto index = HypercubeIndex::build(ds, 8, FamilySpec{}, 11);
        const Key key = index.project(ds.row(0));
        CHECK(index.project(ds.row(1)) == key);
        auto bucket = index.bucket_of(key);
        CHECK(std::count(bucket.begin(), bucket.end(), 0u) == 1);
        CHECK(std::count(bucket.begin(), bucket.end(), 1u) == 1);
    }

    SUBCASE("partition and self-consistency on 10^4 points") {
        const Dataset ds = gen_sphere(10000, 24, 0.1, 7);
        const auto index = HypercubeIndex::build(ds, 13, FamilySpec{}, 19);
        CHECK(total_ids(index) == 10000);

        // Recomputing the key of sampled ids finds them in their stored bucket.
        Rng rng(5);
        for (int t = 0; t < 100; ++t) {
            const auto id = static_cast<std::uint32_t>(rng.uniform_index(10000));
            const Key key = index.project(ds.row(id));
            auto bucket = index.bucket_of(key);
            CHECK(std::count(bucket.begin(), bucket.end(), id) == 1);
        }
    }

    CHECK_THROWS_AS(HypercubeIndex::build(gen_sphere(4, 4, 0.0, 1), 0, FamilySpec{}, 1),
                    ParameterError);
    CHECK_THROWS_AS(HypercubeIndex::build(gen_sphere(4, 4, 0.0, 1), 65, FamilySpec{}, 1),
                    ParameterError);
}

TEST_CASE("project is deterministic and respects key width") {
    const Dataset ds = gen_sphere(50, 8, 0.05, 2);
    const auto index = HypercubeIndex::build(ds, 12, FamilySpec{}, 9);
    const std::vector<double> q{0.1, 0.2, -0.3, 0.4, 0.0, 0.5, -0.6, 0.7};
    const Key a = index.project(q);
    CHECK(index.project(q) == a);
    CHECK((a >> 12) == 0);
    CHECK_THROWS_AS(index.project(std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("two builds with equal inputs are behaviorally identical") {
    const Dataset ds = gen_sphere(200, 16, 0.1, 4);
    FamilySpec family;
    family.w = 1.5;
    const auto a = HypercubeIndex::build(ds, 10, family, 77);
    const auto b = HypercubeIndex::build(ds, 10, family, 77);
    CHECK(a.buckets() == b.buckets());
    Rng rng(8);
    for (int t = 0; t < 50; ++t) {
        std::vector<double> q(16);
        for (auto& x : q) x = rng.normal(0.0, 1.0);
        CHECK(a.project(q) == b.project(q));
    }
}

TEST_CASE("near pairs land closer on the hypercube than far pairs") {
    // Pairs at l2 distance 1 vs 2 with w = 2, d' = 16, over 200 sampled indices.
    const unsigned d_prime = 16;
    FamilySpec family;
    family.w = 2.0;
    double near_total = 0.0;
    double far_total = 0.0;
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        std::vector<double> base(12);
        for (auto& x : base) x = rng.normal(0.0, 1.0);
        std::vector<double> dir(12);
        double norm2 = 0.0;
        for (auto& x : dir) { x = rng.normal(0.0, 1.0); norm2 += x * x; }
        const double inv = 1.0 / std::sqrt(norm2);

        std::vector<double> pts(base);
        pts.insert(pts.end(), base.begin(), base.end());
        pts.insert(pts.end(), base.begin(), base.end());
        for (std::size_t j = 0; j < 12; ++j) {
            pts[12 + j] += dir[j] * inv;        // distance 1
            pts[24 + j] += 2.0 * dir[j] * inv;  // distance 2
        }
        const Dataset ds(3, 12, std::move(pts));
        const auto index = HypercubeIndex::build(ds, d_prime, family, derive_seed(3, 9, t));
        const Key k0 = index.project(ds.row(0));
        near_total += testsupport::popcount64(k0 ^ index.project(ds.row(1)));
        far_total += testsupport::popcount64(k0 ^ index.project(ds.row(2)));
    }
    CHECK(near_total / 200.0 < far_total / 200.0);
    // Expectation bound: E[hamming] <= 0.5 d' (1 - p1) for the near pairs.
    const double p1 = collision_prob_l2(1.0, 2.0);
    CHECK(near_total / 200.0 <= 0.5 * d_prime * (1.0 - p1) * 1.15);
}

TEST_CASE("bucket_of") {
    const Dataset ds = gen_sphere(100, 8, 0.1, 12);
    const auto index = HypercubeIndex::build(ds, 7, FamilySpec{}, 5);

    SUBCASE("indexed point is in its bucket") {
        const Key key = index.project(ds.row(42));
        auto bucket = index.bucket_of(key);
        CHECK(std::count(bucket.begin(), bucket.end(), 42u) == 1);
    }

    SUBCASE("vertices concatenate to a permutation of the id set") {
        std::set<std::uint32_t> seen;
        std::size_t total = 0;
        for (Key key = 0; key < (Key{1} << 7); ++key) {
            for (auto id : index.bucket_of(key)) {
                seen.insert(id);
                ++total;
            }
        }
        CHECK(total == 100);
        CHECK(seen.size() == 100);
        CHECK(*seen.rbegin() == 99);
    }

    SUBCASE("malformed key is rejected") {
        CHECK_THROWS_AS(index.bucket_of(Key{1} << 7), ParameterError);
    }
}

TEST_CASE("save and load round trip") {
    const Dataset ds = gen_sphere(300, 16, 0.1, 6);
    FamilySpec family;
    family.w = 2.5;
    const auto index = HypercubeIndex::build(ds, 9, family, 13);

    TempFile file("hd_test_index.hdlp");
    index.save(file.path);
    const auto loaded = HypercubeIndex::load(file.path, ds);

    CHECK(loaded.d_prime() == index.d_prime());
    CHECK(loaded.family_spec() == index.family_spec());
    CHECK(loaded.buckets() == index.buckets());

    SUBCASE("projection agrees on fresh queries") {
        Rng rng(77);
        for (int t = 0; t < 100; ++t) {
            std::vector<double> q(16);
            for (auto& x : q) x = rng.normal(0.0, 0.8);
            CHECK(loaded.project(q) == index.project(q));
        }
    }

    SUBCASE("memo entries round trip bit-exactly") {
        for (unsigned i = 0; i < index.d_prime(); ++i) {
            CHECK(index.bit_maps()[i].entries_sorted() == loaded.bit_maps()[i].entries_sorted());
            CHECK(index.bit_maps()[i].stream_seed() == loaded.bit_maps()[i].stream_seed());
        }
    }

    SUBCASE("saving twice yields identical bytes") {
        std::ostringstream a(std::ios::binary);
        std::ostringstream b(std::ios::binary);
        index.save(a);
        loaded.save(b);
        CHECK(a.str() == b.str());
    }

    SUBCASE("querying the loaded index extends the memo consistently") {
        Rng rng(78);
        std::vector<double> q(16);
        for (auto& x : q) x = rng.normal(0.0, 5.0);  // far outside: fresh hash values
        CHECK(loaded.project(q) == index.project(q));
    }
}

TEST_CASE("load guards") {
    const Dataset ds = gen_sphere(50, 8, 0.1, 3);
    const auto index = HypercubeIndex::build(ds, 6, FamilySpec{}, 1);
    TempFile file("hd_test_guard.hdlp");
    index.save(file.path);

    SUBCASE("different dataset checksum is refused") {
        const Dataset other = gen_sphere(50, 8, 0.1, 4);
        CHECK_THROWS_WITH_AS(HypercubeIndex::load(file.path, other),
                             doctest::Contains("checksum"), FormatError);
    }

    SUBCASE("truncated file is refused") {
        std::ifstream in(file.path, std::ios::binary);
        std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
        in.close();
        std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
        out.close();
        CHECK_THROWS_AS(HypercubeIndex::load(file.path, ds), FormatError);
    }

    SUBCASE("bad magic is refused") {
        std::ofstream out(file.path, std::ios::binary | std::ios::trunc);
        out << "NOPE garbage";
        out.close();
        CHECK_THROWS_AS(HypercubeIndex::load(file.path, ds), FormatError);
    }

    CHECK_THROWS_AS(HypercubeIndex::load("/nonexistent/file.hdlp", ds), IoError);
}

TEST_CASE("read_index_info reports build metadata") {
    const Dataset ds = gen_sphere(80, 8, 0.1, 3);
    FamilySpec family;
    family.w = 1.25;
    const auto index = HypercubeIndex::build(ds, 6, family, 21);
    TempFile file("hd_test_info.hdlp");
    index.save(file.path);

    const IndexInfo info = read_index_info(file.path);
    CHECK(info.d_prime == 6);
    CHECK(info.n == 80);
    CHECK(info.dim == 8);
    CHECK(info.family.w == 1.25);
    CHECK(info.seed == 21);
    CHECK(info.bucket_count == index.bucket_count());
    CHECK(info.dataset_checksum == ds.checksum());
    CHECK(info.file_bytes == index.serialized_bytes());
}

TEST_CASE("serialized size grows linearly in n") {
    FamilySpec family;
    std::vector<std::size_t> sizes;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        const Dataset ds = gen_sphere(n, 16, 0.1, 44);
        const auto index = HypercubeIndex::build(ds, 10, family, 8);
        sizes.push_back(index.serialized_bytes());
    }
    CHECK(static_cast<double>(sizes[1]) / sizes[0] <= 1.2 * 10.0);
    CHECK(static_cast<double>(sizes[2]) / sizes[1] <= 1.2 * 10.0);
}

TEST_CASE("hyperplane family indexes unit-sphere data") {
    FamilySpec family;
    family.kind = FamilyKind::Hyperplane;
    family.k = 3;
    const Dataset ds = gen_sphere(300, 16, 0.0, 61);  // exact unit sphere
    const auto index = HypercubeIndex::build(ds, 10, family, 62);
    CHECK(index.metric() == Metric::L2);
    CHECK(total_ids(index) == 300);

    // Points project to their stored bucket; off-sphere inputs are rejected.
    const Key key = index.project(ds.row(5));
    auto bucket = index.bucket_of(key);
    CHECK(std::count(bucket.begin(), bucket.end(), 5u) == 1);
    CHECK_THROWS_AS(index.project(std::vector<double>(16, 2.0)), ParameterError);

    TempFile file("hd_test_hyperplane.hdlp");
    index.save(file.path);
    const auto loaded = HypercubeIndex::load(file.path, ds);
    CHECK(loaded.buckets() == index.buckets());
    CHECK(loaded.project(ds.row(9)) == index.project(ds.row(9)));
}

TEST_CASE("grid family indexes under the l1 metric") {
    FamilySpec family;
    family.kind = FamilyKind::GridL1;
    family.k = 4;
    family.w = 4.0;
    const Dataset ds = gen_sphere(200, 8, 0.1, 15);
    const auto index = HypercubeIndex::build(ds, 8, family, 2);
    CHECK(index.metric() == Metric::L1);
    CHECK(total_ids(index) == 200);

    TempFile file("hd_test_grid.hdlp");
    index.save(file.path);
    const auto loaded = HypercubeIndex::load(file.path, ds);
    CHECK(loaded.buckets() == index.buckets());
}
