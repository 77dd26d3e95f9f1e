#include "hyperdolphin/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperdolphin/bench.hpp"
#include "hyperdolphin/dataset.hpp"
#include "hyperdolphin/errors.hpp"
#include "hyperdolphin/search.hpp"

namespace hyperdolphin {

namespace {

std::optional<std::uint64_t> env_seed_override() {
    const char* raw = std::getenv("HYPERDOLPHIN_SEED");
    if (raw == nullptr || *raw == '\0') return std::nullopt;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (end == raw || *end != '\0') {
        throw ParameterError(std::string("HYPERDOLPHIN_SEED is not an integer: ") + raw);
    }
    return static_cast<std::uint64_t>(v);
}

FamilySpec make_family(const std::string& metric, double w, std::uint32_t k, double mu,
                       double sigma, std::size_t n) {
    FamilySpec family;
    if (metric == "l2") {
        family.kind = FamilyKind::RandomLine;
        family.w = w > 0.0 ? w : 2.0;
    } else {
        family.kind = FamilyKind::GridL1;
        family.k = k;
        if (family.k == 0 && n >= 2) family.k = default_dprime(n);
        // w = alpha * r with alpha = k and the conventional fixed radius r = 1.
        family.w = w;
        if (family.w <= 0.0 && family.k > 0) family.w = static_cast<double>(family.k);
    }
    family.mu = mu;
    family.sigma = sigma;
    return family;
}

std::string labels_path_for(const std::string& out) {
    const std::string suffix = ".fvecs";
    if (out.size() > suffix.size() && out.ends_with(suffix)) {
        return out.substr(0, out.size() - suffix.size()) + ".labels.ivecs";
    }
    return out + ".labels.ivecs";
}

int run_gen(const std::string& kind, std::size_t n, std::size_t d, double noise,
            const std::string& dataset_path, std::size_t m, double p_near, double near_sigma,
            std::uint64_t seed, const std::string& out) {
    if (kind == "sphere" || kind == "klein") {
        const double sigma = noise >= 0.0 ? noise : (kind == "sphere" ? 0.1 : 0.05);
        const Dataset ds = kind == "sphere" ? gen_sphere(n, d, sigma, seed)
                                            : gen_klein(n, d, sigma, seed);
        write_vecs(ds, out, VecKind::Float32);
        std::cout << "wrote " << ds.size() << " points of dimension " << ds.dim() << " to " << out
                  << "\n";
        return 0;
    }
    // kind == "queries"
    const Dataset ds = read_vecs(dataset_path, VecKind::Float32);
    double sigma = near_sigma;
    if (sigma <= 0.0) sigma = 1.0 / std::sqrt(static_cast<double>(ds.dim()));
    const QuerySet qs = gen_queries(ds, m, p_near, sigma, seed);
    write_vecs(qs.queries, out, VecKind::Float32);
    if (qs.labels) {
        std::vector<double> flags(qs.labels->begin(), qs.labels->end());
        const std::size_t count = flags.size();
        write_vecs(Dataset(count, 1, std::move(flags)), labels_path_for(out), VecKind::Int32);
    }
    std::cout << "wrote " << qs.queries.size() << " queries of dimension " << qs.queries.dim()
              << " to " << out << " (labels: " << labels_path_for(out) << ")\n";
    return 0;
}

int run_build(const std::string& dataset_path, unsigned d_prime, const std::string& metric,
              double w, std::uint32_t k, double mu, double sigma, std::uint64_t seed,
              const std::string& out) {
    const Dataset ds = read_vecs(dataset_path, VecKind::Float32);
    const unsigned dp = d_prime > 0 ? d_prime : default_dprime(ds.size());
    const FamilySpec family = make_family(metric, w, k, mu, sigma, ds.size());
    const HypercubeIndex index = HypercubeIndex::build(ds, dp, family, seed);
    index.save(out);
    std::cout << "built index: n=" << ds.size() << " d=" << ds.dim() << " dprime=" << dp
              << " family=" << family_name(family.kind) << " -> " << out << " ("
              << index.serialized_bytes() << " bytes)\n";
    return 0;
}

int run_query(const std::string& index_path, const std::string& dataset_path,
              const std::string& queries_path, double radius, std::uint64_t threshold,
              int rho_max, bool all_near, double approximation) {
    const Dataset ds = read_vecs(dataset_path, VecKind::Float32);
    const Dataset qs = read_vecs(queries_path, VecKind::Float32);
    const HypercubeIndex index = HypercubeIndex::load(index_path, ds);

    QueryParams params;
    params.radius = radius;
    params.threshold = threshold > 0 ? threshold : ds.size();
    if (rho_max >= 0) params.max_hamming_radius = static_cast<unsigned>(rho_max);
    if (approximation > 1.0) params.approximation = approximation;

    nlohmann::json results = nlohmann::json::array();
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (all_near) {
            const AllNearOutcome out = query_all_near(index, qs.row(i), params);
            nlohmann::json matches = nlohmann::json::array();
            for (const Witness& w : out.matches) {
                matches.push_back({{"id", w.id}, {"distance", w.distance}});
            }
            results.push_back({{"query", i},
                               {"matches", matches},
                               {"candidates_examined", out.candidates_examined},
                               {"buckets_visited", out.buckets_visited},
                               {"max_radius_reached", out.max_radius_reached}});
        } else {
            const QueryOutcome out = query_decision(index, qs.row(i), params);
            nlohmann::json row{{"query", i},
                               {"answer", out.result ? "yes" : "no"},
                               {"candidates_examined", out.candidates_examined},
                               {"buckets_visited", out.buckets_visited},
                               {"max_radius_reached", out.max_radius_reached}};
            if (out.result) {
                row["id"] = out.result->id;
                row["distance"] = out.result->distance;
            }
            results.push_back(row);
        }
    }
    std::cout << results.dump(2) << "\n";
    return 0;
}

int run_info(const std::string& index_path) {
    const IndexInfo info = read_index_info(index_path);
    nlohmann::json doc{{"version", info.version},
                       {"dprime", info.d_prime},
                       {"family", family_name(info.family.kind)},
                       {"metric", metric_name(info.family.metric())},
                       {"n", info.n},
                       {"d", info.dim},
                       {"w", info.family.w},
                       {"mu", info.family.mu},
                       {"sigma", info.family.sigma},
                       {"k", info.family.k},
                       {"seed", info.seed},
                       {"memo_entries", info.memo_entries},
                       {"buckets", info.bucket_count},
                       {"file_bytes", info.file_bytes},
                       {"dataset_checksum", info.dataset_checksum}};
    std::cout << doc.dump(2) << "\n";
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"hyperdolphin: linear-space near-neighbor search on the Hamming hypercube"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate synthetic datasets or query sets (fvecs)");
    std::string gen_kind;
    std::size_t gen_n = 1000, gen_d = 128, gen_m = 100;
    double gen_noise = -1.0, gen_p_near = 0.5, gen_near_sigma = 0.0;
    std::string gen_dataset, gen_out;
    std::uint64_t gen_seed = 0;
    gen->add_option("--kind", gen_kind, "sphere, klein or queries")
        ->required()
        ->check(CLI::IsMember({"sphere", "klein", "queries"}));
    gen->add_option("--n", gen_n, "number of points");
    gen->add_option("--d", gen_d, "dimension");
    gen->add_option("--noise", gen_noise, "noise sigma (default 0.1 sphere, 0.05 klein)");
    gen->add_option("--dataset", gen_dataset, "source dataset for --kind queries");
    gen->add_option("--m", gen_m, "number of queries for --kind queries");
    gen->add_option("--p-near", gen_p_near, "probability a query lies within radius 1");
    gen->add_option("--near-sigma", gen_near_sigma,
                    "displacement sigma for queries (default 1/sqrt(d))");
    gen->add_option("--seed", gen_seed, "RNG seed");
    gen->add_option("--out", gen_out, "output fvecs path")->required();

    // build
    auto* build = app.add_subcommand("build", "Build and save a hypercube index");
    std::string build_dataset, build_metric = "l2", build_out;
    unsigned build_dprime = 0;
    double build_w = 0.0, build_mu = 0.0, build_sigma = 1.0;
    std::uint32_t build_k = 0;
    std::uint64_t build_seed = 0;
    build->add_option("--dataset", build_dataset, "fvecs dataset")->required();
    build->add_option("--dprime", build_dprime, "hypercube dimension (default floor(log2 n))");
    build->add_option("--metric", build_metric, "l2 (random lines) or l1 (shifted grids)")
        ->check(CLI::IsMember({"l2", "l1"}));
    build->add_option("--w", build_w, "segment/cell width (default 2.0 for l2, k for l1)");
    build->add_option("--k", build_k, "grid amplification (default floor(log2 n) for l1)");
    build->add_option("--mu", build_mu, "line direction mean");
    build->add_option("--sigma", build_sigma, "line direction stddev");
    build->add_option("--seed", build_seed, "RNG seed");
    build->add_option("--out", build_out, "output index path")->required();

    // query
    auto* query = app.add_subcommand("query", "Answer a query set against a saved index");
    std::string query_index, query_dataset, query_queries;
    double query_radius = 1.0, query_c = 0.0;
    std::uint64_t query_threshold = 0;
    int query_rho_max = -1;
    bool query_all = false;
    query->add_option("--index", query_index, "saved index file")->required();
    query->add_option("--dataset", query_dataset, "fvecs dataset the index was built on")
        ->required();
    query->add_option("--queries", query_queries, "fvecs query set")->required();
    query->add_option("--radius", query_radius, "decision radius r")->required();
    query->add_option("--threshold", query_threshold, "max candidates per query (default n)");
    query->add_option("--rho-max", query_rho_max, "max Hamming radius (default d')");
    query->add_option("--c", query_c, "approximation factor, reporting only");
    query->add_flag("--all-near", query_all, "collect all near neighbors instead of deciding");

    // bench
    auto* bench = app.add_subcommand("bench", "Run a benchmark sweep and emit CSV/JSON");
    BenchConfig config;
    std::string bench_dataset, bench_queries, bench_kind, bench_metric = "l2", bench_out;
    std::string bench_format = "csv";
    std::size_t bench_n = 10000, bench_d = 128;
    double bench_noise = -1.0, bench_w = 0.0, bench_mu = 0.0, bench_sigma = 1.0;
    std::uint32_t bench_k = 0;
    std::vector<std::uint64_t> bench_thresholds;
    int bench_rho_max = -1;
    bench->add_option("--dataset", bench_dataset, "fvecs dataset (or use --kind)");
    bench->add_option("--kind", bench_kind, "generator: sphere or klein")
        ->check(CLI::IsMember({"sphere", "klein"}));
    bench->add_option("--n", bench_n, "generated dataset size");
    bench->add_option("--d", bench_d, "generated dataset dimension");
    bench->add_option("--noise", bench_noise, "generator noise sigma");
    bench->add_option("--queries", bench_queries, "fvecs query set (default: generated)");
    bench->add_option("--m", config.num_queries, "number of generated queries");
    bench->add_option("--p-near", config.p_near, "near probability of generated queries");
    bench->add_option("--near-sigma", config.near_sigma, "query displacement sigma");
    bench->add_option("--dprime", config.d_prime, "hypercube dimension (default floor(log2 n))");
    bench->add_option("--metric", bench_metric, "l2 or l1")
        ->check(CLI::IsMember({"l2", "l1"}));
    bench->add_option("--w", bench_w, "segment/cell width");
    bench->add_option("--k", bench_k, "grid amplification");
    bench->add_option("--mu", bench_mu, "line direction mean");
    bench->add_option("--sigma", bench_sigma, "line direction stddev");
    bench->add_option("--radius", config.radius, "decision radius r");
    bench->add_option("--threshold", bench_thresholds,
                      "candidate threshold, repeatable (default 1 10 100 1000)");
    bench->add_option("--rho-max", bench_rho_max, "max Hamming radius (default d')");
    bench->add_option("--seed", config.seed, "RNG seed");
    bench->add_option("--repeat", config.repetitions, "timed repetitions per sweep point");
    bench->add_option("--threads", config.threads, "parallel query batches (default 1)");
    bench->add_option("--out", bench_out, "output stem; .csv and .json are written")->required();
    bench->add_option("--format", bench_format, "which report to echo on stdout")
        ->check(CLI::IsMember({"csv", "json"}));

    // info
    auto* info = app.add_subcommand("info", "Print metadata of a saved index");
    std::string info_index;
    info->add_option("--index", info_index, "saved index file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        const auto seed_override = env_seed_override();
        if (seed_override) {
            gen_seed = *seed_override;
            build_seed = *seed_override;
            config.seed = *seed_override;
        }

        if (app.got_subcommand(gen)) {
            if (gen_kind == "queries" && gen_dataset.empty()) {
                std::cerr << "gen --kind queries requires --dataset\n";
                return 2;
            }
            return run_gen(gen_kind, gen_n, gen_d, gen_noise, gen_dataset, gen_m, gen_p_near,
                           gen_near_sigma, gen_seed, gen_out);
        }
        if (app.got_subcommand(build)) {
            return run_build(build_dataset, build_dprime, build_metric, build_w, build_k,
                             build_mu, build_sigma, build_seed, build_out);
        }
        if (app.got_subcommand(query)) {
            return run_query(query_index, query_dataset, query_queries, query_radius,
                             query_threshold, query_rho_max, query_all, query_c);
        }
        if (app.got_subcommand(bench)) {
            if (bench_dataset.empty() == bench_kind.empty()) {
                std::cerr << "bench requires exactly one of --dataset or --kind\n";
                return 2;
            }
            if (!bench_dataset.empty()) {
                config.dataset_path = bench_dataset;
            } else {
                GeneratorSpec spec;
                spec.kind = bench_kind == "sphere" ? GeneratorSpec::Kind::Sphere
                                                   : GeneratorSpec::Kind::Klein;
                spec.n = bench_n;
                spec.d = bench_d;
                spec.noise_sigma =
                    bench_noise >= 0.0 ? bench_noise : (bench_kind == "sphere" ? 0.1 : 0.05);
                config.dataset_gen = spec;
            }
            if (!bench_queries.empty()) config.queries_path = bench_queries;
            config.family = make_family(bench_metric, bench_w, bench_k, bench_mu, bench_sigma,
                                        config.dataset_gen ? config.dataset_gen->n : 0);
            config.thresholds =
                bench_thresholds.empty() ? std::vector<std::uint64_t>{1, 10, 100, 1000}
                                         : bench_thresholds;
            if (bench_rho_max >= 0) config.rho_max = static_cast<unsigned>(bench_rho_max);
            config.out_path = bench_out;

            const BenchReport report = run_bench(config);
            std::cout << (bench_format == "json" ? report_json(report) : report_csv(report));
            return 0;
        }
        if (app.got_subcommand(info)) {
            return run_info(info_index);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace hyperdolphin
