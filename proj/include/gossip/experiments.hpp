#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gossip/data.hpp"
#include "gossip/engine.hpp"
#include "gossip/errors.hpp"
#include "gossip/gorank.hpp"
#include "gossip/gotrim.hpp"
#include "gossip/graph.hpp"
#include "gossip/metrics.hpp"
#include "gossip/rankstat.hpp"
#include "gossip/rng.hpp"

// Reproductions of the three gossip experiments (rank estimation, Wilcoxon
// statistic, trimmed mean) plus the spectral summary of a topology. The CLI
// is a thin wrapper around these.

namespace gossip {

enum class GraphKind { complete, watts_strogatz, geometric };
enum class Sampling { async, uniform };
enum class DataKind { integers, cauchy, file };

inline std::string to_string(GraphKind k) {
    switch (k) {
        case GraphKind::complete: return "complete";
        case GraphKind::watts_strogatz: return "ws";
        case GraphKind::geometric: return "geometric";
    }
    return "?";
}

inline std::string to_string(Sampling s) { return s == Sampling::async ? "async" : "uniform"; }

inline std::string to_string(DataKind d) {
    switch (d) {
        case DataKind::integers: return "integers";
        case DataKind::cauchy: return "cauchy";
        case DataKind::file: return "file";
    }
    return "?";
}

struct GraphSpec {
    GraphKind kind = GraphKind::complete;
    std::size_t n = 500;
    std::size_t ws_k = 4;
    double ws_p = 0.2;
    double radius = 0.1;
    std::uint64_t seed = 1;
};

struct DataSpec {
    DataKind kind = DataKind::integers;
    std::optional<std::size_t> n1;  // cauchy: defaults to n / 2
    double loc1 = 0.8;
    double loc2 = 0.0;
    double cauchy_scale = 1.0;
    Dataset loaded;  // DataKind::file
    std::uint64_t seed = 1;
};

struct ExperimentConfig {
    GraphSpec graph;
    DataSpec data;
    Sampling sampling = Sampling::async;
    bool compare_sampling = false;
    std::uint64_t ticks = 50000;
    std::uint64_t record_every = 100;
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    unsigned threads = default_thread_count();
    std::optional<bool> ties;  // unset: on iff the observed data has duplicates
    std::optional<double> alpha;
    double epsilon = 0.0;  // 0 disables corruption
    double scale = 10.0;

    bool ties_mode(const Dataset& observed) const {
        return ties.value_or(detail::has_duplicates(observed.values));
    }
};

inline Graph build_graph(const GraphSpec& spec) {
    switch (spec.kind) {
        case GraphKind::complete: return build_complete(spec.n);
        case GraphKind::watts_strogatz: return build_watts_strogatz(spec.n, spec.ws_k, spec.ws_p, spec.seed);
        case GraphKind::geometric: return build_random_geometric(spec.n, spec.radius, spec.seed);
    }
    throw invalid_parameter("unknown graph kind");
}

inline EdgeDistribution make_distribution(const Graph& g, Sampling s) {
    return s == Sampling::async ? async_edge_distribution(g) : sync_variant_distribution(g);
}

struct SpectralReport {
    std::size_t n = 0;
    std::size_t edges = 0;
    bool connected = false;
    bool bipartite = false;
    double gap_async = 0.0;
    double gap_uniform = 0.0;
    double lambda2_swap_async = 0.0;     // lambda_2(1)
    double lambda2_average_async = 0.0;  // lambda_2(2)
    double lambda2_swap_uniform = 0.0;
    double lambda2_average_uniform = 0.0;
};

inline SpectralReport spectral_report(const Graph& g) {
    SpectralReport r;
    r.n = g.size();
    r.edges = g.edge_count();
    r.connected = is_connected(g);
    r.bipartite = is_bipartite(g);
    const auto async = async_edge_distribution(g);
    const auto uniform = uniform_edge_distribution(g);
    r.gap_async = spectral_gap(weighted_laplacian(g, async));
    r.gap_uniform = spectral_gap(weighted_laplacian(g, uniform));
    r.lambda2_swap_async = second_largest_eigenvalue(expected_gossip_matrix(g, async, 1));
    r.lambda2_average_async = second_largest_eigenvalue(expected_gossip_matrix(g, async, 2));
    r.lambda2_swap_uniform = second_largest_eigenvalue(expected_gossip_matrix(g, uniform, 1));
    r.lambda2_average_uniform = second_largest_eigenvalue(expected_gossip_matrix(g, uniform, 2));
    return r;
}

/// Dataset for a config. Cauchy data uses n1 = n / 2 unless overridden.
inline Dataset make_dataset(const ExperimentConfig& cfg) {
    const auto n = cfg.graph.n;
    switch (cfg.data.kind) {
        case DataKind::integers: return integer_dataset(n);
        case DataKind::cauchy: {
            const auto n1 = cfg.data.n1.value_or(n / 2);
            if (n1 < 1 || n1 >= n) {
                throw invalid_parameter("cauchy data: n1 must lie in [1, n-1]");
            }
            return cauchy_two_sample(n1, n - n1, cfg.data.loc1, cfg.data.loc2, cfg.data.cauchy_scale,
                                     cfg.data.seed);
        }
        case DataKind::file:
            if (cfg.data.loaded.size() != n) {
                throw invalid_parameter("data file has " + std::to_string(cfg.data.loaded.size()) +
                                        " rows but n=" + std::to_string(n));
            }
            return cfg.data.loaded;
    }
    throw invalid_parameter("unknown data kind");
}

inline void require_common(const ExperimentConfig& cfg) {
    if (cfg.ticks < 1) {
        throw invalid_parameter("ticks must be >= 1");
    }
    if (cfg.record_every < 1) {
        throw invalid_parameter("record-every must be >= 1");
    }
    if (cfg.trials < 1) {
        throw invalid_parameter("trials must be >= 1");
    }
}

struct RankExperiment {
    bool ties = false;
    std::size_t edges = 0;
    double gap = 0.0;
    // One entry per sampling mode run, primary mode first.
    std::vector<Sampling> modes;
    std::vector<AggregatedTrace> errors;
};

/// GoRank on the dataset scattered afresh in every trial; metric is the mean
/// normalized rank error.
inline RankExperiment run_rank_experiment(const ExperimentConfig& cfg) {
    require_common(cfg);
    const Graph g = build_graph(cfg.graph);
    require_simulable(g);
    const Dataset data = make_dataset(cfg);
    const bool ties = cfg.ties_mode(data);
    RankExperiment out;
    out.ties = ties;
    out.edges = g.edge_count();
    out.modes.push_back(cfg.sampling);
    if (cfg.compare_sampling) {
        out.modes.push_back(cfg.sampling == Sampling::async ? Sampling::uniform : Sampling::async);
    }
    out.gap = spectral_gap(weighted_laplacian(g, make_distribution(g, cfg.sampling)));
    for (auto mode : out.modes) {
        const EdgeSampler sampler(g, make_distribution(g, mode));
        auto trial = [&](RngStream& rng, std::size_t) {
            const auto nodes = assign_to_nodes(data, g.size(), rng);
            const auto exact = exact_ranks(nodes.values, ties);
            GoRank est(nodes.values, ties);
            Metric<GoRank> metric = [&exact](const GoRank& e) { return mean_rank_error(e.rank_estimates(), exact); };
            return std::vector<Trace>{run(est, sampler, cfg.ticks, cfg.record_every, metric, rng)};
        };
        out.errors.push_back(run_trials(trial, cfg.trials, cfg.base_seed, cfg.threads).front());
    }
    return out;
}

struct WilcoxonExperiment {
    bool ties = false;
    std::size_t edges = 0;
    double gap = 0.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    double statistic = 0.0;  // oracle t_n
    WilcoxonTest oracle_test;
    WilcoxonTest gossip_test;  // from the trial-mean of the final node-average estimate
    AggregatedTrace relative_error;
    AggregatedTrace mean_estimate;
};

inline Partition partition_from_labels(const std::vector<Sample>& labels) {
    std::vector<bool> in_first(labels.size());
    for (std::size_t k = 0; k < labels.size(); ++k) {
        in_first[k] = labels[k] == Sample::first;
    }
    return Partition(std::move(in_first));
}

/// Gossip estimation of the Wilcoxon rank-sum statistic of S1.
inline WilcoxonExperiment run_wilcoxon_experiment(const ExperimentConfig& cfg) {
    require_common(cfg);
    ExperimentConfig resolved = cfg;
    if (resolved.data.kind == DataKind::integers) {
        resolved.data.kind = DataKind::cauchy;
    }
    const Graph g = build_graph(resolved.graph);
    require_simulable(g);
    const Dataset data = make_dataset(resolved);
    if (!data.labelled()) {
        throw invalid_parameter("wilcoxon needs a labelled (two-sample) dataset");
    }
    const bool ties = resolved.ties_mode(data);
    const auto pooled = partition_from_labels(data.labels);

    WilcoxonExperiment out;
    out.ties = ties;
    out.edges = g.edge_count();
    const auto dist = make_distribution(g, resolved.sampling);
    out.gap = spectral_gap(weighted_laplacian(g, dist));
    out.n1 = pooled.n1();
    out.n2 = pooled.n2();
    out.statistic = centralized_statistic(data.values, wilcoxon_scores(pooled), ties);
    out.oracle_test = wilcoxon_test(out.statistic, out.n1, out.n2);

    const EdgeSampler sampler(g, dist);
    auto trial = [&](RngStream& rng, std::size_t) {
        const auto nodes = assign_to_nodes(data, g.size(), rng);
        const auto part = partition_from_labels(nodes.labels);
        const double reference = centralized_statistic(nodes.values, wilcoxon_scores(part), ties);
        auto est = make_rank_statistic(nodes.values, wilcoxon_scores(part), ties);
        using Est = decltype(est);
        std::vector<Metric<Est>> metrics{
            [reference](const Est& e) { return relative_stat_error(e.estimates(), reference); },
            [](const Est& e) {
                double s = 0.0;
                for (double z : e.estimates()) {
                    s += z;
                }
                return s / static_cast<double>(e.size());
            }};
        return run(est, sampler, resolved.ticks, resolved.record_every, std::span<const Metric<Est>>(metrics), rng);
    };
    auto traces = run_trials(trial, resolved.trials, resolved.base_seed, resolved.threads);
    out.relative_error = std::move(traces[0]);
    out.mean_estimate = std::move(traces[1]);
    out.gossip_test = wilcoxon_test(out.mean_estimate.mean.back(), out.n1, out.n2);
    return out;
}

struct TrimExperiment {
    bool ties = false;
    std::size_t edges = 0;
    double gap = 0.0;
    double alpha = 0.0;
    std::size_t corrupted = 0;
    double clean_trimmed_mean = 0.0;      // reference x_bar_alpha
    double corrupted_trimmed_mean = 0.0;  // what the gossip estimators converge to
    double corrupted_mean = 0.0;
    double baseline_error = 0.0;  // |corrupted mean - x_bar_alpha|
    AggregatedTrace adaptive_error;
    AggregatedTrace original_error;
    AggregatedTrace mass_deviation;  // mean_k |M_k - 1|
};

/// Adaptive and original GoTrim read-outs from one simulation per trial, on the
/// dataset after optional scale corruption. Errors are measured against the
/// trimmed mean of the clean data.
inline TrimExperiment run_trim_experiment(const ExperimentConfig& cfg) {
    require_common(cfg);
    if (!cfg.alpha) {
        throw invalid_parameter("trim needs --alpha");
    }
    const Graph g = build_graph(cfg.graph);
    require_simulable(g);
    const Dataset clean = make_dataset(cfg);
    Dataset observed = clean;
    TrimExperiment out;
    if (cfg.epsilon != 0.0) {
        auto corrupted = scale_corrupt(clean, cfg.epsilon, cfg.scale, derive_seed(cfg.data.seed, 0x636f7272));
        out.corrupted = corrupted.indices.size();
        observed = std::move(corrupted.data);
    }
    const bool ties = cfg.ties_mode(observed);
    out.ties = ties;
    const TrimParams params(*cfg.alpha, g.size());
    out.alpha = params.alpha();
    out.clean_trimmed_mean = centralized_trimmed_mean(clean.values, params.alpha());
    out.corrupted_trimmed_mean = centralized_trimmed_mean(observed.values, params.alpha());
    double total = 0.0;
    for (double v : observed.values) {
        total += v;
    }
    out.corrupted_mean = total / static_cast<double>(observed.size());
    out.baseline_error = std::abs(out.corrupted_mean - out.clean_trimmed_mean);
    out.edges = g.edge_count();
    const auto dist = make_distribution(g, cfg.sampling);
    out.gap = spectral_gap(weighted_laplacian(g, dist));

    const EdgeSampler sampler(g, dist);
    const double reference = out.clean_trimmed_mean;
    auto trial = [&](RngStream& rng, std::size_t) {
        const auto nodes = assign_to_nodes(observed, g.size(), rng);
        auto est = make_gotrim(nodes.values, params.alpha(), ties);
        using Est = decltype(est);
        std::vector<Metric<Est>> metrics{
            [reference](const Est& e) { return trim_error(e.estimates(true), reference); },
            [reference](const Est& e) { return trim_error(e.estimates(false), reference); },
            [](const Est& e) { return trim_error(e.weight_mass(), 1.0); }};
        return run(est, sampler, cfg.ticks, cfg.record_every, std::span<const Metric<Est>>(metrics), rng);
    };
    auto traces = run_trials(trial, cfg.trials, cfg.base_seed, cfg.threads);
    out.adaptive_error = std::move(traces[0]);
    out.original_error = std::move(traces[1]);
    out.mass_deviation = std::move(traces[2]);
    return out;
}

}  // namespace gossip
