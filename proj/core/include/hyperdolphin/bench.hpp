#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hyperdolphin/hypercube.hpp"

namespace hyperdolphin {

struct GeneratorSpec {
    enum class Kind { Sphere, Klein };
    Kind kind = Kind::Sphere;
    std::size_t n = 0;
    std::size_t d = 0;
    double noise_sigma = 0.1;
};

/// One benchmark campaign: a dataset (file or generator), a query workload,
/// an index family, and an ascending threshold sweep.
struct BenchConfig {
    std::optional<std::string> dataset_path;
    std::optional<GeneratorSpec> dataset_gen;

    std::optional<std::string> queries_path;  // fvecs; absent = generate
    std::size_t num_queries = 100;
    double p_near = 0.5;
    double near_sigma = 0.0;  // 0 = pick 1/sqrt(d)

    unsigned d_prime = 0;  // 0 = default_dprime(n)
    FamilySpec family;
    double radius = 1.0;
    std::vector<std::uint64_t> thresholds;  // positive, strictly ascending
    std::optional<unsigned> rho_max;
    unsigned repetitions = 1;
    unsigned threads = 1;  // >1 runs independent query batches concurrently

    std::string out_path;  // stem; .csv and .json are both written
    std::uint64_t seed = 0;
};

struct BenchRow {
    std::size_t config_id = 0;
    std::size_t n = 0;
    std::size_t d = 0;
    unsigned dprime = 0;
    Metric metric = Metric::L2;
    double w = 0.0;
    std::uint64_t threshold = 0;
    double build_s = 0.0;
    double query_mean_s = 0.0;
    double query_median_s = 0.0;
    double candidates_mean = 0.0;
    double buckets_mean = 0.0;
    double accuracy = 0.0;         // decision agreement with the brute-force oracle
    double recall_all_near = 0.0;  // recall of the oracle's near set (JSON only)
    double speedup = 0.0;          // brute-force mean time / index mean time
    std::uint64_t index_bytes = 0;
    double brute_mean_s = 0.0;     // raw baseline behind the speedup column (JSON only)
};

struct BenchReport {
    std::vector<BenchRow> rows;
    std::uint64_t seed = 0;
    unsigned repetitions = 1;
};

/// Runs the sweep: per threshold, build the index, run every query twice
/// (warm-up pass discarded), score decision accuracy and all-near recall
/// against brute force, and record timing and size statistics. Writes
/// <out>.csv and <out>.json atomically when out_path is set.
BenchReport run_bench(const BenchConfig& config);

/// Fixed columns: config_id,n,d,dprime,metric,w,threshold,build_s,query_mean_s,
/// query_median_s,candidates_mean,buckets_mean,accuracy,speedup,index_bytes.
std::string report_csv(const BenchReport& report);
std::string report_json(const BenchReport& report);

const char* metric_name(Metric metric);

}  // namespace hyperdolphin
