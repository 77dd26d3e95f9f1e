#include <benchmark/benchmark.h>

#include <vector>

#include "hyperdolphin/dataset.hpp"
#include "hyperdolphin/hypercube.hpp"
#include "hyperdolphin/rng.hpp"
#include "hyperdolphin/search.hpp"

using namespace hyperdolphin;

namespace {

const Dataset& sphere_10k() {
    static const Dataset ds = gen_sphere(10000, 128, 0.1, 7);
    return ds;
}

const HypercubeIndex& index_10k() {
    static const HypercubeIndex index =
        HypercubeIndex::build(sphere_10k(), 13, FamilySpec{}, 11);
    return index;
}

}  // namespace

static void BM_CollisionProbL2(benchmark::State& state) {
    double eta = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(collision_prob_l2(eta, 2.0));
        eta = eta < 4.0 ? eta + 1e-6 : 0.5;
    }
}
BENCHMARK(BM_CollisionProbL2);

static void BM_EvalLineHash(benchmark::State& state) {
    const auto d = static_cast<std::size_t>(state.range(0));
    const auto h = sample_line_family(d, 2.0, 0.0, 1.0, 3);
    std::vector<double> p(d, 0.25);
    for (auto _ : state) {
        benchmark::DoNotOptimize(h.eval(p));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_EvalLineHash)->Arg(128)->Arg(512)->Arg(1024);

static void BM_Project(benchmark::State& state) {
    const auto& index = index_10k();
    std::vector<double> q(sphere_10k().row(42).begin(), sphere_10k().row(42).end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(index.project(q));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Project);

static void BM_HammingBall(benchmark::State& state) {
    const auto rho = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        HammingBallEnumerator it(0x155, 16, rho);
        std::uint64_t sum = 0;
        while (auto key = it.next()) sum ^= *key;
        benchmark::DoNotOptimize(sum);
    }
}
BENCHMARK(BM_HammingBall)->Arg(1)->Arg(2)->Arg(4);

static void BM_QueryDecision(benchmark::State& state) {
    const auto& index = index_10k();
    const auto threshold = static_cast<std::uint64_t>(state.range(0));
    Rng rng(5);
    std::vector<double> q(128);
    const auto src = rng.uniform_index(10000);
    for (std::size_t j = 0; j < 128; ++j) {
        q[j] = sphere_10k().row(src)[j] + rng.normal(0.0, 0.02);
    }
    QueryParams params;
    params.radius = 1.0;
    params.threshold = threshold;
    for (auto _ : state) {
        benchmark::DoNotOptimize(query_decision(index, q, params));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QueryDecision)->Arg(10)->Arg(100)->Arg(1000);

static void BM_BruteForce(benchmark::State& state) {
    const auto& ds = sphere_10k();
    std::vector<double> q(ds.row(7).begin(), ds.row(7).end());
    for (auto _ : state) {
        benchmark::DoNotOptimize(brute_force_near(ds, q, 1.0, Metric::L2));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BruteForce);

BENCHMARK_MAIN();
