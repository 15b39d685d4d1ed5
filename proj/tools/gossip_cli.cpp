// gossip: command-line driver for the gossip rank/statistic/trimmed-mean
// experiments and the spectral summary of a communication graph.
//
//   gossip spectral --graph ws --n 500
//   gossip rank --graph ws --n 500 --compare-sampling --out runs/rank
//   gossip wilcoxon --graph complete --n 500 --out runs/wilcoxon
//   gossip trim --alpha 0.4 --epsilon 0.3 --scale 10 --out runs/trim
//
// Every option may also come from an INI-style file given with --config
// (`key = value`, keys are the long option names); flags override the file.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gossip/experiments.hpp"

namespace {

using namespace gossip;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitEstimator = 4;

struct CliOptions {
    std::string graph = "complete";
    std::size_t n = 500;
    std::size_t ws_k = 4;
    double ws_p = 0.2;
    double radius = 0.1;
    std::string sampling = "async";
    bool compare_sampling = false;
    std::uint64_t ticks = 50000;
    std::size_t trials = 100;
    std::uint64_t record_every = 100;
    std::optional<double> alpha;
    double epsilon = 0.0;
    double scale = 10.0;
    bool ties = false;
    bool no_ties = false;
    std::uint64_t seed = 1;
    std::optional<std::uint64_t> graph_seed;
    std::optional<std::uint64_t> data_seed;
    std::string data = "default";
    std::string data_file;
    std::optional<std::size_t> n1;
    double loc1 = 0.8;
    double loc2 = 0.0;
    double cauchy_scale = 1.0;
    unsigned threads = default_thread_count();
    std::string out;
    std::string dump_data;
};

// Ordered key/value report, written to stdout and to the provenance sidecar.
class Report {
public:
    template <class T>
    void add(const std::string& key, const T& value) {
        std::ostringstream os;
        os << std::setprecision(12) << std::boolalpha << value;
        rows_.emplace_back(key, os.str());
    }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : rows_) {
            os << k << " = " << v << '\n';
        }
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

ExperimentConfig resolve(const CliOptions& o, const std::string& command) {
    ExperimentConfig cfg;
    if (o.graph == "complete") {
        cfg.graph.kind = GraphKind::complete;
    } else if (o.graph == "ws") {
        cfg.graph.kind = GraphKind::watts_strogatz;
    } else if (o.graph == "geometric") {
        cfg.graph.kind = GraphKind::geometric;
    } else {
        throw invalid_parameter("unknown --graph '" + o.graph + "'");
    }
    cfg.graph.n = o.n;
    cfg.graph.ws_k = o.ws_k;
    cfg.graph.ws_p = o.ws_p;
    cfg.graph.radius = o.radius;
    cfg.graph.seed = o.graph_seed.value_or(derive_seed(o.seed, 1));

    if (o.sampling == "async") {
        cfg.sampling = Sampling::async;
    } else if (o.sampling == "uniform") {
        cfg.sampling = Sampling::uniform;
    } else {
        throw invalid_parameter("unknown --sampling '" + o.sampling + "'");
    }
    cfg.compare_sampling = o.compare_sampling;

    std::string data = o.data;
    if (data == "default") {
        data = !o.data_file.empty() ? "file" : command == "wilcoxon" ? "cauchy" : "integers";
    }
    if (data == "integers") {
        cfg.data.kind = DataKind::integers;
    } else if (data == "cauchy") {
        cfg.data.kind = DataKind::cauchy;
    } else if (data == "file") {
        if (o.data_file.empty()) {
            throw invalid_parameter("--data file needs --data-file");
        }
        std::ifstream in(o.data_file);
        if (!in) {
            throw invalid_parameter("cannot open data file '" + o.data_file + "'");
        }
        cfg.data.kind = DataKind::file;
        cfg.data.loaded = read_dataset_csv(in);
    } else {
        throw invalid_parameter("unknown --data '" + o.data + "'");
    }
    cfg.data.n1 = o.n1;
    cfg.data.loc1 = o.loc1;
    cfg.data.loc2 = o.loc2;
    cfg.data.cauchy_scale = o.cauchy_scale;
    cfg.data.seed = o.data_seed.value_or(derive_seed(o.seed, 2));

    cfg.ticks = o.ticks;
    cfg.record_every = o.record_every;
    cfg.trials = o.trials;
    cfg.base_seed = o.seed;
    cfg.threads = o.threads;
    if (o.ties && o.no_ties) {
        throw invalid_parameter("--ties and --no-ties are exclusive");
    }
    if (o.ties) {
        cfg.ties = true;
    } else if (o.no_ties) {
        cfg.ties = false;
    }
    cfg.alpha = o.alpha;
    cfg.epsilon = o.epsilon;
    cfg.scale = o.scale;
    if (command == "trim" && !cfg.alpha) {
        throw invalid_parameter("trim requires --alpha");
    }
    if (cfg.epsilon != 0.0 && !(cfg.epsilon > 0.0 && cfg.epsilon < 0.5)) {
        throw invalid_parameter("--epsilon must lie in (0, 1/2)");
    }
    return cfg;
}

void echo_config(Report& r, const std::string& command, const ExperimentConfig& cfg) {
    r.add("command", command);
    r.add("graph", to_string(cfg.graph.kind));
    r.add("n", cfg.graph.n);
    if (cfg.graph.kind == GraphKind::watts_strogatz) {
        r.add("ws_k", cfg.graph.ws_k);
        r.add("ws_p", cfg.graph.ws_p);
    }
    if (cfg.graph.kind == GraphKind::geometric) {
        r.add("geo_radius", cfg.graph.radius);
    }
    r.add("graph_seed", cfg.graph.seed);
    if (command == "spectral") {
        return;
    }
    r.add("sampling", to_string(cfg.sampling));
    r.add("data", to_string(cfg.data.kind));
    r.add("data_seed", cfg.data.seed);
    r.add("ties", cfg.ties ? (*cfg.ties ? "on" : "off") : "auto");
    r.add("ticks", cfg.ticks);
    r.add("record_every", cfg.record_every);
    r.add("trials", cfg.trials);
    r.add("seed", cfg.base_seed);
    r.add("seed_rule", "trial t uses splitmix64(splitmix64(seed) ^ splitmix64(t + 1))");
}

void write_sidecar(const std::string& prefix, const Report& r) {
    std::ofstream os(prefix + ".provenance.txt");
    if (!os) {
        throw invalid_parameter("cannot write '" + prefix + ".provenance.txt'");
    }
    r.write(os);
}

struct Column {
    std::string name;
    const std::vector<double>* values = nullptr;
    std::optional<double> constant;
};

// tick,mean_error,std_error[,extra...] with 12 significant digits.
void write_trace_csv(const std::string& path, const std::vector<std::uint64_t>& ticks,
                     const std::vector<Column>& columns) {
    std::ofstream os(path);
    if (!os) {
        throw invalid_parameter("cannot write '" + path + "'");
    }
    os << std::setprecision(12);
    os << "tick";
    for (const auto& c : columns) {
        os << ',' << c.name;
    }
    os << '\n';
    for (std::size_t p = 0; p < ticks.size(); ++p) {
        os << ticks[p];
        for (const auto& c : columns) {
            os << ',' << (c.constant ? *c.constant : (*c.values)[p]);
        }
        os << '\n';
    }
}

void ensure_parent(const std::string& prefix) {
    const auto parent = std::filesystem::path(prefix).parent_path();
    if (!parent.empty()) {
        std::filesystem::create_directories(parent);
    }
}

void dump_dataset(const CliOptions& o, const ExperimentConfig& cfg) {
    if (o.dump_data.empty()) {
        return;
    }
    std::ofstream os(o.dump_data);
    if (!os) {
        throw invalid_parameter("cannot write '" + o.dump_data + "'");
    }
    write_dataset_csv(os, make_dataset(cfg));
}

void add_spectral(Report& r, const SpectralReport& s) {
    r.add("edges", s.edges);
    r.add("connected", s.connected);
    r.add("bipartite", s.bipartite);
    r.add("gap_async", s.gap_async);
    r.add("gap_uniform", s.gap_uniform);
    r.add("lambda2_swap_async", s.lambda2_swap_async);
    r.add("lambda2_average_async", s.lambda2_average_async);
    r.add("lambda2_swap_uniform", s.lambda2_swap_uniform);
    r.add("lambda2_average_uniform", s.lambda2_average_uniform);
}

int cmd_spectral(const CliOptions& o) {
    const auto cfg = resolve(o, "spectral");
    Report r;
    echo_config(r, "spectral", cfg);
    add_spectral(r, spectral_report(build_graph(cfg.graph)));
    r.write(std::cout);
    if (!o.out.empty()) {
        ensure_parent(o.out);
        write_sidecar(o.out, r);
    }
    return kExitOk;
}

int cmd_rank(const CliOptions& o) {
    const auto cfg = resolve(o, "rank");
    dump_dataset(o, cfg);
    const auto res = run_rank_experiment(cfg);
    const std::string prefix = o.out.empty() ? "rank" : o.out;
    ensure_parent(prefix);
    Report r;
    echo_config(r, "rank", cfg);
    r.add("ties_mode", res.ties);
    r.add("edges", res.edges);
    r.add("gap", res.gap);
    for (std::size_t m = 0; m < res.modes.size(); ++m) {
        const auto& tr = res.errors[m];
        const auto path = prefix + "." + to_string(res.modes[m]) + ".csv";
        write_trace_csv(path, tr.ticks, {{"mean_error", &tr.mean, {}}, {"std_error", &tr.stddev, {}}});
        r.add("final_mean_error_" + to_string(res.modes[m]), tr.mean.back());
        r.add("trace_" + to_string(res.modes[m]), path);
    }
    write_sidecar(prefix, r);
    r.write(std::cout);
    return kExitOk;
}

int cmd_wilcoxon(const CliOptions& o) {
    const auto cfg = resolve(o, "wilcoxon");
    dump_dataset(o, cfg);
    const auto res = run_wilcoxon_experiment(cfg);
    const std::string prefix = o.out.empty() ? "wilcoxon" : o.out;
    ensure_parent(prefix);
    write_trace_csv(prefix + ".csv", res.relative_error.ticks,
                    {{"mean_error", &res.relative_error.mean, {}},
                     {"std_error", &res.relative_error.stddev, {}},
                     {"mean_estimate", &res.mean_estimate.mean, {}}});
    Report r;
    echo_config(r, "wilcoxon", cfg);
    r.add("ties_mode", res.ties);
    r.add("edges", res.edges);
    r.add("gap", res.gap);
    r.add("n1", res.n1);
    r.add("n2", res.n2);
    r.add("statistic", res.statistic);
    r.add("final_mean_relative_error", res.relative_error.mean.back());
    r.add("final_mean_estimate", res.mean_estimate.mean.back());
    r.add("test_mean", res.oracle_test.mean);
    r.add("test_stddev", res.oracle_test.stddev);
    r.add("z", res.oracle_test.z);
    r.add("p_value", res.oracle_test.p_value);
    r.add("gossip_z", res.gossip_test.z);
    r.add("gossip_p_value", res.gossip_test.p_value);
    r.add("trace", prefix + ".csv");
    write_sidecar(prefix, r);
    r.write(std::cout);
    return kExitOk;
}

int cmd_trim(const CliOptions& o) {
    const auto cfg = resolve(o, "trim");
    dump_dataset(o, cfg);
    const auto res = run_trim_experiment(cfg);
    const std::string prefix = o.out.empty() ? "trim" : o.out;
    ensure_parent(prefix);
    write_trace_csv(prefix + ".csv", res.adaptive_error.ticks,
                    {{"mean_error", &res.adaptive_error.mean, {}},
                     {"std_error", &res.adaptive_error.stddev, {}},
                     {"original_mean_error", &res.original_error.mean, {}},
                     {"original_std_error", &res.original_error.stddev, {}},
                     {"corrupted_mean_error", nullptr, res.baseline_error}});
    Report r;
    echo_config(r, "trim", cfg);
    r.add("ties_mode", res.ties);
    r.add("alpha", res.alpha);
    r.add("epsilon", cfg.epsilon);
    r.add("scale", cfg.scale);
    r.add("corrupted_values", res.corrupted);
    r.add("edges", res.edges);
    r.add("gap", res.gap);
    r.add("trimmed_mean", res.clean_trimmed_mean);
    r.add("corrupted_trimmed_mean", res.corrupted_trimmed_mean);
    r.add("corrupted_mean", res.corrupted_mean);
    r.add("corrupted_mean_error", res.baseline_error);
    r.add("final_adaptive_error", res.adaptive_error.mean.back());
    r.add("final_original_error", res.original_error.mean.back());
    r.add("final_mass_deviation", res.mass_deviation.mean.back());
    r.add("trace", prefix + ".csv");
    write_sidecar(prefix, r);
    r.write(std::cout);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asynchronous gossip estimation of ranks, rank statistics and trimmed means"};
    app.set_config("--config", "", "INI-style key = value file; flags override it");
    app.require_subcommand(1);
    app.fallthrough();

    CliOptions o;
    app.add_option("--graph", o.graph, "complete | ws | geometric")
        ->check(CLI::IsMember({"complete", "ws", "geometric"}));
    app.add_option("--n", o.n, "number of nodes");
    app.add_option("--ws-k", o.ws_k, "Watts-Strogatz lattice degree (even)");
    app.add_option("--ws-p", o.ws_p, "Watts-Strogatz rewiring probability");
    app.add_option("--geo-radius", o.radius, "geometric graph connection radius");
    app.add_option("--sampling", o.sampling, "async | uniform")->check(CLI::IsMember({"async", "uniform"}));
    app.add_flag("--compare-sampling", o.compare_sampling, "rank: also run the other sampling mode");
    app.add_option("--ticks", o.ticks, "edge activations per trial");
    app.add_option("--trials", o.trials, "independent trials");
    app.add_option("--record-every", o.record_every, "snapshot period in ticks");
    app.add_option("--alpha", o.alpha, "trimming level in [0, 1/2)");
    app.add_option("--epsilon", o.epsilon, "fraction of scale-corrupted values (0 = none)");
    app.add_option("--scale", o.scale, "corruption factor s (x -> s x)");
    app.add_flag("--ties", o.ties, "mid-rank tie handling");
    app.add_flag("--no-ties", o.no_ties, "reject tied observations");
    app.add_option("--seed", o.seed, "base seed for trials (and derived graph/data seeds)");
    app.add_option("--graph-seed", o.graph_seed, "override graph seed");
    app.add_option("--data-seed", o.data_seed, "override dataset/corruption seed");
    app.add_option("--data", o.data, "integers | cauchy | file")
        ->check(CLI::IsMember({"default", "integers", "cauchy", "file"}));
    app.add_option("--data-file", o.data_file, "dataset CSV (index,value,label)");
    app.add_option("--n1", o.n1, "size of sample S1 for cauchy data (default n/2)");
    app.add_option("--loc1", o.loc1, "Cauchy location of S1");
    app.add_option("--loc2", o.loc2, "Cauchy location of S2");
    app.add_option("--cauchy-scale", o.cauchy_scale, "Cauchy scale");
    app.add_option("--threads", o.threads, "worker threads for trials");
    app.add_option("--out", o.out, "output prefix");
    app.add_option("--dump-data", o.dump_data, "write the generated dataset as CSV");

    auto* spectral = app.add_subcommand("spectral", "graph statistics and spectral gaps");
    auto* rank = app.add_subcommand("rank", "GoRank rank-error traces");
    auto* wilcoxon = app.add_subcommand("wilcoxon", "gossip Wilcoxon statistic and rank-sum test");
    auto* trim = app.add_subcommand("trim", "adaptive vs original GoTrim traces");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (spectral->parsed()) {
            return cmd_spectral(o);
        }
        if (rank->parsed()) {
            return cmd_rank(o);
        }
        if (wilcoxon->parsed()) {
            return cmd_wilcoxon(o);
        }
        if (trim->parsed()) {
            return cmd_trim(o);
        }
    } catch (const generation_failure& e) {
        std::cerr << "generation failure: " << e.what() << '\n';
        return kExitGeneration;
    } catch (const estimator_failure& e) {
        std::cerr << "estimator failure: " << e.what() << '\n';
        return kExitEstimator;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
