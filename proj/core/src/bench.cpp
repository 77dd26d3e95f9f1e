#include "hyperdolphin/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include "json.hpp"

#include "hyperdolphin/errors.hpp"
#include "hyperdolphin/rng.hpp"
#include "hyperdolphin/search.hpp"

namespace hyperdolphin {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kQueryGenTag = 0x716e6774;  // "qngt"
constexpr std::uint64_t kIndexTag = 0x69647874;     // "idxt"

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

void validate_config(const BenchConfig& config) {
    if (!config.dataset_path && !config.dataset_gen) {
        throw ParameterError("bench: need a dataset file or a generator spec");
    }
    if (config.dataset_path && config.dataset_gen) {
        throw ParameterError("bench: dataset file and generator spec are mutually exclusive");
    }
    if (config.thresholds.empty()) throw ParameterError("bench: threshold sweep is empty");
    for (std::size_t i = 0; i < config.thresholds.size(); ++i) {
        if (config.thresholds[i] < 1) throw ParameterError("bench: thresholds must be positive");
        if (i > 0 && config.thresholds[i] <= config.thresholds[i - 1]) {
            throw ParameterError("bench: thresholds must be strictly ascending");
        }
    }
    if (config.repetitions < 1) throw ParameterError("bench: repetitions must be at least 1");
    if (config.threads < 1) throw ParameterError("bench: threads must be at least 1");
    if (!(config.radius > 0.0)) throw ParameterError("bench: radius must be positive");
    if (!config.queries_path && config.num_queries < 1) {
        throw ParameterError("bench: num_queries must be at least 1");
    }
}

Dataset load_bench_dataset(const BenchConfig& config) {
    if (config.dataset_path) return read_vecs(*config.dataset_path, VecKind::Float32);
    const GeneratorSpec& gen = *config.dataset_gen;
    if (gen.kind == GeneratorSpec::Kind::Sphere) {
        return gen_sphere(gen.n, gen.d, gen.noise_sigma, config.seed);
    }
    return gen_klein(gen.n, gen.d, gen.noise_sigma, config.seed);
}

Dataset load_bench_queries(const BenchConfig& config, const Dataset& dataset) {
    if (config.queries_path) return read_vecs(*config.queries_path, VecKind::Float32);
    double sigma = config.near_sigma;
    if (sigma <= 0.0) sigma = 1.0 / std::sqrt(static_cast<double>(dataset.dim()));
    QuerySet qs = gen_queries(dataset, config.num_queries, config.p_near, sigma,
                              derive_seed(config.seed, kQueryGenTag, 0));
    return std::move(qs.queries);
}

void write_atomically(const std::string& path, const std::string& payload) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("bench: cannot open " + tmp + " for writing");
        out << payload;
        if (!out) throw IoError("bench: write to " + tmp + " failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        throw IoError("bench: cannot rename " + tmp + " to " + path);
    }
}

struct WorkloadStats {
    std::vector<double> query_seconds;
    std::vector<QueryOutcome> outcomes;
};

// Decision pass over all queries; per-query wall times recorded.
WorkloadStats run_decision_pass(const HypercubeIndex& index, const Dataset& queries,
                                const QueryParams& params, unsigned threads) {
    const std::size_t m = queries.size();
    WorkloadStats stats;
    stats.query_seconds.resize(m);
    stats.outcomes.resize(m);
    if (threads <= 1) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto start = Clock::now();
            stats.outcomes[i] = query_decision(index, queries.row(i), params);
            stats.query_seconds[i] = seconds_since(start);
        }
        return stats;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (m + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(m, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                const auto start = Clock::now();
                stats.outcomes[i] = query_decision(index, queries.row(i), params);
                stats.query_seconds[i] = seconds_since(start);
            }
        });
    }
    for (auto& th : pool) th.join();
    return stats;
}

}  // namespace

const char* metric_name(Metric metric) { return metric == Metric::L2 ? "l2" : "l1"; }

BenchReport run_bench(const BenchConfig& config) {
    validate_config(config);

    const Dataset dataset = load_bench_dataset(config);
    const Dataset queries = load_bench_queries(config, dataset);
    if (queries.dim() != dataset.dim()) {
        throw ShapeError("bench: query dimension does not match dataset");
    }
    const unsigned d_prime = config.d_prime ? config.d_prime : default_dprime(dataset.size());

    // Resolve family defaults that depend on the dataset size.
    FamilySpec family = config.family;
    if (family.kind == FamilyKind::GridL1) {
        if (family.k == 0) family.k = default_dprime(dataset.size());
        if (family.w <= 0.0) family.w = static_cast<double>(family.k);
    } else if (family.w <= 0.0) {
        family.w = 2.0;
    }
    const Metric metric = family.metric();

    // Brute-force oracle: near sets at the bench radius, plus the speedup baseline.
    std::vector<std::vector<Witness>> oracle(queries.size());
    std::vector<double> brute_seconds(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const auto start = Clock::now();
        oracle[i] = brute_force_near(dataset, queries.row(i), config.radius, metric);
        brute_seconds[i] = seconds_since(start);
    }
    const double brute_mean = mean_of(brute_seconds);

    BenchReport report;
    report.seed = config.seed;
    report.repetitions = config.repetitions;

    for (std::size_t sweep = 0; sweep < config.thresholds.size(); ++sweep) {
        const std::uint64_t threshold = config.thresholds[sweep];
        QueryParams params;
        params.radius = config.radius;
        params.threshold = threshold;
        params.max_hamming_radius = config.rho_max;

        const auto build_start = Clock::now();
        const HypercubeIndex index = HypercubeIndex::build(
            dataset, d_prime, family, derive_seed(config.seed, kIndexTag, 0));
        const double build_s = seconds_since(build_start);

        run_decision_pass(index, queries, params, config.threads);  // warm-up, discarded

        std::vector<double> times;
        WorkloadStats last;
        for (unsigned rep = 0; rep < config.repetitions; ++rep) {
            last = run_decision_pass(index, queries, params, config.threads);
            times.insert(times.end(), last.query_seconds.begin(), last.query_seconds.end());
        }

        std::size_t agree = 0;
        double candidates = 0.0;
        double buckets = 0.0;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            const bool oracle_yes = !oracle[i].empty();
            const bool index_yes = last.outcomes[i].result.has_value();
            if (oracle_yes == index_yes) ++agree;
            candidates += static_cast<double>(last.outcomes[i].candidates_examined);
            buckets += static_cast<double>(last.outcomes[i].buckets_visited);
        }

        // Recall of the oracle's near sets under the same budget (untimed).
        std::size_t truth_total = 0;
        std::size_t found_total = 0;
        for (std::size_t i = 0; i < queries.size(); ++i) {
            truth_total += oracle[i].size();
            if (oracle[i].empty()) continue;
            const AllNearOutcome all = query_all_near(index, queries.row(i), params);
            // Every reported match is within radius, hence a member of the oracle set.
            found_total += all.matches.size();
        }

        BenchRow row;
        row.config_id = sweep;
        row.n = dataset.size();
        row.d = dataset.dim();
        row.dprime = d_prime;
        row.metric = metric;
        row.w = family.w;
        row.threshold = threshold;
        row.build_s = build_s;
        row.query_mean_s = mean_of(times);
        row.query_median_s = median_of(times);
        row.candidates_mean = candidates / static_cast<double>(queries.size());
        row.buckets_mean = buckets / static_cast<double>(queries.size());
        row.accuracy = static_cast<double>(agree) / static_cast<double>(queries.size());
        row.recall_all_near =
            truth_total == 0 ? 1.0
                             : static_cast<double>(found_total) / static_cast<double>(truth_total);
        row.speedup = row.query_mean_s > 0.0 ? brute_mean / row.query_mean_s : 0.0;
        row.index_bytes = index.serialized_bytes();
        row.brute_mean_s = brute_mean;
        report.rows.push_back(row);
    }

    if (!config.out_path.empty()) {
        std::string stem = config.out_path;
        for (const char* ext : {".csv", ".json"}) {
            if (stem.size() > 4 && stem.ends_with(ext)) {
                stem.resize(stem.size() - std::string(ext).size());
                break;
            }
        }
        write_atomically(stem + ".csv", report_csv(report));
        write_atomically(stem + ".json", report_json(report));
    }
    return report;
}

std::string report_csv(const BenchReport& report) {
    std::ostringstream out;
    out << "config_id,n,d,dprime,metric,w,threshold,build_s,query_mean_s,query_median_s,"
           "candidates_mean,buckets_mean,accuracy,speedup,index_bytes\n";
    out.precision(9);
    for (const BenchRow& r : report.rows) {
        out << r.config_id << ',' << r.n << ',' << r.d << ',' << r.dprime << ','
            << metric_name(r.metric) << ',' << r.w << ',' << r.threshold << ',' << r.build_s
            << ',' << r.query_mean_s << ',' << r.query_median_s << ',' << r.candidates_mean << ','
            << r.buckets_mean << ',' << r.accuracy << ',' << r.speedup << ',' << r.index_bytes
            << '\n';
    }
    return out.str();
}

std::string report_json(const BenchReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const BenchRow& r : report.rows) {
        rows.push_back({{"config_id", r.config_id},
                        {"n", r.n},
                        {"d", r.d},
                        {"dprime", r.dprime},
                        {"metric", metric_name(r.metric)},
                        {"w", r.w},
                        {"threshold", r.threshold},
                        {"build_s", r.build_s},
                        {"query_mean_s", r.query_mean_s},
                        {"query_median_s", r.query_median_s},
                        {"candidates_mean", r.candidates_mean},
                        {"buckets_mean", r.buckets_mean},
                        {"accuracy", r.accuracy},
                        {"recall_all_near", r.recall_all_near},
                        {"speedup", r.speedup},
                        {"index_bytes", r.index_bytes},
                        {"brute_mean_s", r.brute_mean_s}});
    }
    nlohmann::json doc{{"seed", report.seed}, {"repetitions", report.repetitions}, {"rows", rows}};
    return doc.dump(2) + "\n";
}

}  // namespace hyperdolphin
