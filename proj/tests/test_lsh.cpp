#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "hyperdolphin/errors.hpp"
#include "hyperdolphin/lsh.hpp"
#include "hyperdolphin/rng.hpp"
#include "support/oracles.hpp"

using namespace hyperdolphin;

TEST_CASE("sample_line_family is deterministic under a fixed seed") {
    const auto a = sample_line_family(3, 1.0, 0.0, 1.0, 42);
    const auto b = sample_line_family(3, 1.0, 0.0, 1.0, 42);
    CHECK(a == b);
    const auto c = sample_line_family(3, 1.0, 0.0, 1.0, 43);
    CHECK(a != c);
}

TEST_CASE("sample_line_family offset lies in [0, w)") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto h = sample_line_family(2, 4.0, 0.0, 1.0, seed);
        CHECK(h.offset >= 0.0);
        CHECK(h.offset < 4.0);
        CHECK(h.direction.size() == 2);
    }
}

TEST_CASE("sample_line_family rejects bad parameters") {
    CHECK_THROWS_AS(sample_line_family(0, 1.0, 0.0, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(sample_line_family(3, 0.0, 0.0, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(sample_line_family(3, -1.0, 0.0, 1.0, 1), ParameterError);
    CHECK_THROWS_AS(sample_line_family(3, 1.0, 0.0, 0.0, 1), ParameterError);
}

TEST_CASE("line direction coordinates follow the requested normal law") {
    // 10^3 hash draws in dimension 10^3: the pooled coordinate mean has
    // standard error sigma / sqrt(10^6).
    std::vector<double> coords;
    coords.reserve(1000 * 1000);
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const auto h = sample_line_family(1000, 3.0, 0.0, 1.0, derive_seed(7, 1, seed));
        coords.insert(coords.end(), h.direction.begin(), h.direction.end());
    }
    const double se = 1.0 / std::sqrt(static_cast<double>(coords.size()));
    CHECK(std::abs(testsupport::mean(coords)) < 4.0 * se);
    CHECK(testsupport::stddev(coords) == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("eval_line_hash computes floor((<p,v>+t)/w)") {
    RandomLineHash h;
    h.direction = {1.0, 0.0};
    h.offset = 0.5;
    h.width = 1.0;
    CHECK(h.eval(std::vector<double>{2.0, 7.7}) == 2);  // floor(2.5)

    RandomLineHash zero_offset;
    zero_offset.direction = {0.3, -0.8, 2.1};
    zero_offset.offset = 0.0;
    zero_offset.width = 1.0;
    CHECK(zero_offset.eval(std::vector<double>{0.0, 0.0, 0.0}) == 0);

    CHECK_THROWS_AS(h.eval(std::vector<double>{1.0}), ShapeError);
}

TEST_CASE("line hash Monte-Carlo collision rate matches the closed form") {
    // Pair at l2 distance 1, w = 3; alpha(1,3) = 0.73429324927707669 computed
    // by adaptive quadrature of the collision integral.
    const double expected = 0.73429324927707669;
    const std::size_t d = 8;
    std::vector<double> p(d, 0.25);
    std::vector<double> q(p);
    q[3] += 1.0;
    std::size_t collisions = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto h = sample_line_family(d, 3.0, 0.0, 1.0, derive_seed(11, 2, t));
        if (h.eval(p) == h.eval(q)) ++collisions;
    }
    const double rate = static_cast<double>(collisions) / static_cast<double>(trials);
    CHECK(std::abs(rate - expected) < 0.02);
    const double se = std::sqrt(expected * (1.0 - expected) / trials);
    CHECK(std::abs(rate - expected) < 3.0 * se);
}

TEST_CASE("hyperplane hash sign patterns") {
    const auto h = sample_hyperplane_family(5, 1, 99);
    std::vector<double> v(h.directions.begin(), h.directions.begin() + 5);
    CHECK(h.eval(v) == 1);  // <v, v> = 1 > 0
    std::vector<double> neg(v);
    for (auto& x : neg) x = -x;
    CHECK(h.eval(neg) == 0);

    std::vector<double> not_unit(5, 1.0);
    CHECK_THROWS_AS(h.eval(not_unit), ParameterError);
    CHECK_THROWS_AS(h.eval(std::vector<double>{1.0}), ShapeError);
    CHECK_THROWS_AS(sample_hyperplane_family(5, 0, 1), ParameterError);
    CHECK_THROWS_AS(sample_hyperplane_family(5, 65, 1), ParameterError);
}

TEST_CASE("hyperplane directions are unit vectors") {
    const auto h = sample_hyperplane_family(16, 8, 4);
    for (std::uint32_t j = 0; j < 8; ++j) {
        double norm2 = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
            const double x = h.directions[j * 16 + i];
            norm2 += x * x;
        }
        CHECK(std::sqrt(norm2) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("hyperplane Monte-Carlo collision rate is 1 - theta/pi") {
    // Unit vectors at a fixed angle in the plane of the first two axes.
    const double theta = 1.1;
    const std::size_t d = 6;
    std::vector<double> p(d, 0.0);
    std::vector<double> q(d, 0.0);
    p[0] = 1.0;
    q[0] = std::cos(theta);
    q[1] = std::sin(theta);
    std::size_t collisions = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto h = sample_hyperplane_family(d, 1, derive_seed(5, 3, t));
        if (h.eval(p) == h.eval(q)) ++collisions;
    }
    const double rate = static_cast<double>(collisions) / static_cast<double>(trials);
    const double expected = 1.0 - theta / std::numbers::pi;
    CHECK(std::abs(rate - expected) < 0.02);
    const double se = std::sqrt(expected * (1.0 - expected) / trials);
    CHECK(std::abs(rate - expected) < 3.0 * se);
}

TEST_CASE("grid l1 hash cells and canonical mixing") {
    GridL1Hash h;
    h.dim = 1;
    h.amplification = 1;
    h.width = 2.0;
    h.offsets = {0.5};
    const auto cells = h.cells(std::vector<double>{3.0});
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == 1);  // floor(3.5 / 2)

    // Equal tuples always map to equal canonical integers.
    const auto g = sample_grid_l1_family(4, 3, 5.0, 17);
    std::vector<double> p{0.1, -2.0, 7.5, 3.3};
    CHECK(g.eval(p) == g.eval(p));
    CHECK(g.cells(p) == g.cells(p));
    CHECK_THROWS_AS(g.eval(std::vector<double>{1.0}), ShapeError);
    CHECK_THROWS_AS(sample_grid_l1_family(4, 0, 5.0, 1), ParameterError);
    CHECK_THROWS_AS(sample_grid_l1_family(4, 3, 0.0, 1), ParameterError);
}

TEST_CASE("grid l1 Monte-Carlo collision rate beats the (1-1/alpha)^k bound") {
    // ||p - q||_1 = 1 with alpha = k = 10, w = alpha * r = 10 (r = 1).
    const std::size_t d = 5;
    const std::uint32_t k = 10;
    const double w = 10.0;
    std::vector<double> p{0.3, 1.7, -0.4, 2.2, 0.0};
    std::vector<double> q(p);
    q[0] += 0.4;
    q[2] -= 0.6;  // l1 displacement 1.0
    std::size_t collisions = 0;
    const std::size_t trials = 10000;
    for (std::size_t t = 0; t < trials; ++t) {
        const auto h = sample_grid_l1_family(d, k, w, derive_seed(23, 4, t));
        if (h.eval(p) == h.eval(q)) ++collisions;
    }
    const double rate = static_cast<double>(collisions) / static_cast<double>(trials);
    const double bound = std::pow(1.0 - 1.0 / 10.0, 10);  // 0.34867844
    CHECK(rate >= bound - 0.02);
    // Exact collision probability: prod_j (1 - |dp_j| / w)^k over displaced coords.
    const double exact = std::pow((1.0 - 0.4 / w) * (1.0 - 0.6 / w), k);
    CHECK(std::abs(rate - exact) < 0.02);
    const double se = std::sqrt(exact * (1.0 - exact) / trials);
    CHECK(std::abs(rate - exact) < 3.0 * se);
}

TEST_CASE("collision_prob_l2 matches adaptive quadrature of the alpha integral") {
    CHECK(collision_prob_l2(1.0, 3.0) ==
          doctest::Approx(0.73429324927707669).epsilon(1e-12));
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const double eta = 0.5 + 3.5 * i / 7.0;
            const double w = 0.5 + 3.5 * j / 7.0;
            const double closed = collision_prob_l2(eta, w);
            const double quad = testsupport::collision_prob_quadrature(eta, w);
            CHECK(std::abs(closed - quad) < 1e-6);
        }
    }
}

TEST_CASE("collision_prob_l2 limits, scale invariance and monotonicity") {
    // All mass collides as w grows; 1 - alpha decays like sqrt(2/pi)/w.
    CHECK(1.0 - collision_prob_l2(1.0, 100.0) < 1e-2);
    CHECK(1.0 - collision_prob_l2(1.0, 1e7) < 1e-6);
    CHECK(collision_prob_l2(2.0, 2.0) == collision_prob_l2(1.0, 1.0));

    Rng rng(3);
    for (int i = 0; i < 200; ++i) {
        const double eta = rng.uniform(0.1, 5.0);
        const double w = rng.uniform(0.1, 5.0);
        const double s = rng.uniform(0.1, 10.0);
        CHECK(std::abs(collision_prob_l2(s * eta, s * w) - collision_prob_l2(eta, w)) < 1e-12);
    }

    // Strictly decreasing in eta, strictly increasing in w, on a 100-point grid.
    for (int i = 0; i < 100; ++i) {
        const double eta = 0.2 + 0.05 * i;
        CHECK(collision_prob_l2(eta, 2.0) > collision_prob_l2(eta + 0.05, 2.0));
        const double w = 0.2 + 0.05 * i;
        CHECK(collision_prob_l2(1.5, w) < collision_prob_l2(1.5, w + 0.05));
    }

    CHECK_THROWS_AS(collision_prob_l2(0.0, 1.0), ParameterError);
    CHECK_THROWS_AS(collision_prob_l2(1.0, 0.0), ParameterError);
}

TEST_CASE("delta_exponent") {
    CHECK(delta_exponent(1.0, 0.0) == doctest::Approx(0.36067376022224085).epsilon(1e-15));
    CHECK_THROWS_AS(delta_exponent(0.3, 0.3), ParameterError);
    CHECK_THROWS_AS(delta_exponent(0.3, 0.4), ParameterError);

    // At c = 2 with w = c the exponent clears the 0.03 (c-1)^2 bound.
    const double p1 = collision_prob_l2(1.0, 2.0);
    const double p2 = collision_prob_l2(2.0, 2.0);
    CHECK(delta_exponent(p1, p2) >= 0.03);
}

TEST_CASE("binary_entropy") {
    CHECK(binary_entropy(0.5) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(1.0) == 0.0);
    CHECK_THROWS_AS(binary_entropy(-0.01), ParameterError);
    CHECK_THROWS_AS(binary_entropy(1.01), ParameterError);
}

TEST_CASE("w = c inequalities hold across c in (1, 2]") {
    for (int i = 1; i <= 50; ++i) {
        const double c = 1.0 + i * 0.02;
        const double p1 = collision_prob_l2(1.0, c);
        const double p2 = collision_prob_l2(c, c);
        CAPTURE(c);
        CHECK(p1 - p2 > 5.0 * (c - 1.0) / 21.0);
        CHECK(binary_entropy((1.0 - p1) / 2.0) < 0.9);
        CHECK(delta_exponent(p1, p2) >= 0.03 * (c - 1.0) * (c - 1.0));
    }
}

TEST_CASE("SensitivityParams validation and line_sensitivity") {
    const auto s = line_sensitivity(1.0, 2.0, 2.0);
    CHECK(s.p1 == collision_prob_l2(1.0, 2.0));
    CHECK(s.p2 == collision_prob_l2(2.0, 2.0));
    CHECK(s.r1 == 1.0);
    CHECK(s.r2 == 2.0);
    CHECK_THROWS_AS(SensitivityParams(0.2, 0.4, 1.0, 2.0), ParameterError);
    CHECK_THROWS_AS(SensitivityParams(0.4, 0.2, 2.0, 1.0), ParameterError);
    CHECK_THROWS_AS(line_sensitivity(1.0, 0.9, 2.0), ParameterError);
}
