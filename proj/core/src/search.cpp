#include "hyperdolphin/search.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hyperdolphin/errors.hpp"

namespace hyperdolphin {

namespace {

// First mask with popcount rho (the rho lowest bits), shift-safe up to rho = 64.
std::uint64_t first_mask(unsigned rho) {
    if (rho == 0) return 0;
    return ~std::uint64_t{0} >> (64 - rho);
}

std::uint64_t last_mask(unsigned rho, unsigned d_prime) {
    return first_mask(rho) << (d_prime - rho);
}

// Gosper's hack: next larger integer with the same popcount. Numeric order of
// the masks equals lexicographic order of the flipped-position combinations.
std::uint64_t next_mask(std::uint64_t mask) {
    const std::uint64_t c = mask & (~mask + 1);
    const std::uint64_t r = mask + c;
    return (((mask ^ r) >> 2) / c) | r;
}

void validate_params(const HypercubeIndex& index, std::span<const double> q,
                     const QueryParams& params) {
    if (q.size() != index.dataset().dim()) {
        throw ShapeError("query: point dimension " + std::to_string(q.size()) +
                         " does not match dataset dimension " +
                         std::to_string(index.dataset().dim()));
    }
    if (!(params.radius > 0.0)) throw ParameterError("query: radius must be positive");
    if (params.threshold < 1) throw ParameterError("query: threshold must be at least 1");
    if (params.approximation && !(*params.approximation > 1.0)) {
        throw ParameterError("query: approximation factor must exceed 1");
    }
    if (params.max_hamming_radius && *params.max_hamming_radius > index.d_prime()) {
        throw ParameterError("query: max Hamming radius must lie in [0, d']");
    }
}

}  // namespace

HammingBallEnumerator::HammingBallEnumerator(Key center, unsigned d_prime, unsigned rho_max)
    : center_(center), d_prime_(d_prime), rho_max_(rho_max) {
    if (d_prime < 1 || d_prime > 64) {
        throw ParameterError("HammingBallEnumerator: d' must lie in [1, 64]");
    }
    if (rho_max > d_prime) {
        throw ParameterError("HammingBallEnumerator: rho must lie in [0, d']");
    }
    if (d_prime < 64 && (center >> d_prime) != 0) {
        throw ParameterError("HammingBallEnumerator: center key has bits at positions >= d'");
    }
}

std::optional<Key> HammingBallEnumerator::next() {
    if (done_) return std::nullopt;
    if (!started_) {
        started_ = true;
        radius_ = 0;
        if (rho_max_ == 0) done_ = true;  // emit the center, then stop
        return center_;
    }
    if (radius_ == 0 || mask_ == last_mask(radius_, d_prime_)) {
        if (radius_ >= rho_max_) {
            done_ = true;
            return std::nullopt;
        }
        ++radius_;
        mask_ = first_mask(radius_);
    } else {
        mask_ = next_mask(mask_);
    }
    return center_ ^ mask_;
}

std::vector<Key> hamming_ball(Key center, unsigned d_prime, unsigned rho) {
    HammingBallEnumerator it(center, d_prime, rho);
    std::vector<Key> keys;
    while (auto key = it.next()) keys.push_back(*key);
    return keys;
}

double metric_distance(std::span<const double> p, std::span<const double> q, Metric metric) {
    if (p.size() != q.size()) {
        throw ShapeError("metric_distance: dimensions " + std::to_string(p.size()) + " and " +
                         std::to_string(q.size()) + " differ");
    }
    double acc = 0.0;
    if (metric == Metric::L2) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double diff = p[i] - q[i];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    }
    for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
    return acc;
}

QueryOutcome query_decision(const HypercubeIndex& index, std::span<const double> q,
                            const QueryParams& params) {
    validate_params(index, q, params);
    const unsigned rho_max = params.max_hamming_radius.value_or(index.d_prime());
    const Metric metric = index.metric();
    const Dataset& data = index.dataset();

    QueryOutcome out;
    HammingBallEnumerator ball(index.project(q), index.d_prime(), rho_max);
    while (auto key = ball.next()) {
        ++out.buckets_visited;
        out.max_radius_reached = ball.current_radius();
        for (std::uint32_t id : index.bucket_of(*key)) {
            ++out.candidates_examined;
            const double dist = metric_distance(q, data.row(id), metric);
            if (dist <= params.radius) {
                out.result = Witness{id, dist};
                return out;
            }
            if (out.candidates_examined >= params.threshold) return out;  // budget spent
        }
    }
    return out;
}

AllNearOutcome query_all_near(const HypercubeIndex& index, std::span<const double> q,
                              const QueryParams& params) {
    validate_params(index, q, params);
    const unsigned rho_max = params.max_hamming_radius.value_or(index.d_prime());
    const Metric metric = index.metric();
    const Dataset& data = index.dataset();

    AllNearOutcome out;
    HammingBallEnumerator ball(index.project(q), index.d_prime(), rho_max);
    bool budget_spent = false;
    while (!budget_spent) {
        auto key = ball.next();
        if (!key) break;
        ++out.buckets_visited;
        out.max_radius_reached = ball.current_radius();
        for (std::uint32_t id : index.bucket_of(*key)) {
            ++out.candidates_examined;
            const double dist = metric_distance(q, data.row(id), metric);
            if (dist <= params.radius) out.matches.push_back(Witness{id, dist});
            if (out.candidates_examined >= params.threshold) {
                budget_spent = true;
                break;
            }
        }
    }
    std::sort(out.matches.begin(), out.matches.end(), [](const Witness& a, const Witness& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    });
    return out;
}

std::vector<Witness> brute_force_near(const Dataset& dataset, std::span<const double> q,
                                      double radius, Metric metric) {
    if (q.size() != dataset.dim()) {
        throw ShapeError("brute_force_near: point dimension does not match dataset");
    }
    std::vector<Witness> hits;
    for (std::uint32_t id = 0; id < dataset.size(); ++id) {
        const double dist = metric_distance(q, dataset.row(id), metric);
        if (dist <= radius) hits.push_back(Witness{id, dist});
    }
    std::sort(hits.begin(), hits.end(), [](const Witness& a, const Witness& b) {
        return a.distance != b.distance ? a.distance < b.distance : a.id < b.id;
    });
    return hits;
}

unsigned hamming_radius_cap(unsigned d_prime, double p1) {
    if (d_prime < 1 || d_prime > 64) {
        throw ParameterError("hamming_radius_cap: d' must lie in [1, 64]");
    }
    if (!(p1 > 0.0 && p1 <= 1.0)) {
        throw ParameterError("hamming_radius_cap: p1 must lie in (0, 1]");
    }
    return static_cast<unsigned>(std::floor(d_prime * (1.0 - p1) / 2.0));
}

}  // namespace hyperdolphin
