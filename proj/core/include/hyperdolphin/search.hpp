#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hyperdolphin/hypercube.hpp"

namespace hyperdolphin {

struct QueryParams {
    double radius = 1.0;                        // r > 0, decision radius
    std::optional<double> approximation;        // c > 1, reporting only
    std::uint64_t threshold = 1;                // T >= 1, max candidates examined
    std::optional<unsigned> max_hamming_radius; // rho_max in [0, d']; default d'
};

struct Witness {
    std::uint32_t id = 0;
    double distance = 0.0;
};

struct QueryOutcome {
    std::optional<Witness> result;           // empty = "no"
    std::uint64_t candidates_examined = 0;   // always <= threshold
    std::uint64_t buckets_visited = 0;       // hypercube vertices probed, empty or not
    unsigned max_radius_reached = 0;         // Hamming radius of the last probed vertex
};

struct AllNearOutcome {
    std::vector<Witness> matches;            // ascending (distance, id)
    std::uint64_t candidates_examined = 0;
    std::uint64_t buckets_visited = 0;
    unsigned max_radius_reached = 0;
};

/// Enumerates hypercube vertices in non-decreasing Hamming distance from a
/// center key, up to radius rho_max. Within one distance class the flipped bit
/// positions advance in lexicographic combination order, so the sequence is
/// deterministic and duplicate-free.
class HammingBallEnumerator {
public:
    HammingBallEnumerator(Key center, unsigned d_prime, unsigned rho_max);

    /// Next key, or nullopt once the ball is exhausted.
    std::optional<Key> next();

    /// Hamming distance of the most recently emitted key.
    unsigned current_radius() const { return radius_; }

private:
    Key center_ = 0;
    unsigned d_prime_ = 0;
    unsigned rho_max_ = 0;
    unsigned radius_ = 0;
    std::uint64_t mask_ = 0;
    bool started_ = false;
    bool done_ = false;
};

/// Materialized ball, distance classes 0..rho. Intended for small d'.
std::vector<Key> hamming_ball(Key center, unsigned d_prime, unsigned rho);

/// l2 or l1 distance with double accumulation.
double metric_distance(std::span<const double> p, std::span<const double> q, Metric metric);

/// Decision query: probe buckets in ball order, test candidates against the
/// exact metric, return the first point within radius. "No" means the candidate
/// threshold was spent or the ball was exhausted without a hit.
QueryOutcome query_decision(const HypercubeIndex& index, std::span<const double> q,
                            const QueryParams& params);

/// Same traversal, but collects every candidate within radius until the
/// threshold is spent or the ball ends. Matches are sorted by (distance, id).
AllNearOutcome query_all_near(const HypercubeIndex& index, std::span<const double> q,
                              const QueryParams& params);

/// Exact linear scan; ground truth for accuracy and recall.
std::vector<Witness> brute_force_near(const Dataset& dataset, std::span<const double> q,
                                      double radius, Metric metric);

/// Ball radius floor(d' (1 - p1) / 2) at which near pairs are expected to land;
/// an optional tighter cap for QueryParams::max_hamming_radius.
unsigned hamming_radius_cap(unsigned d_prime, double p1);

}  // namespace hyperdolphin
