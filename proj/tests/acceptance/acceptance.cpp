// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Tolerances are fixed below.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/SVD>

#include "gossip/experiments.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace gossip;

namespace {

// AC1
constexpr double kCompleteGapTol = 1e-4;
constexpr double kReportedCompleteGap = 4.01e-3;
constexpr double kAc1Seconds = 30.0;
// AC2
constexpr double kWsGapLo = 1e-4, kWsGapHi = 1e-3, kWsShare = 0.9;
constexpr double kGeoGapLo = 5e-6, kGeoGapHi = 2e-4, kGeoShare = 0.8;
constexpr int kGapSeeds = 20;
// AC3
constexpr int kMatrixGraphs = 50;
constexpr double kMatrixTol = 1e-8;
// AC4
constexpr int kOracleInstances = 1000;
constexpr double kWeightedTol = 1e-12;
// AC5
constexpr double kRankSlopeLo = -0.7, kRankSlopeHi = -0.3, kAc5Seconds = 300.0;
// AC6
constexpr int kRecoveryTrials = 100, kRecoveryNeeded = 95;
// AC7
constexpr double kWilcoxonSlopeLo = -1.3, kWilcoxonSlopeHi = -0.7;
constexpr double kGeometricRadius100 = 0.15;
// AC8
constexpr int kTestTriples = 100;
constexpr double kTestTol = 1e-8;
// AC9
constexpr double kTrimSlopeLo = -0.8, kTrimSlopeHi = -0.2;
// AC10
constexpr double kAc10Seconds = 1800.0;

// Final decade of a 5e4-tick trace recorded every 100 ticks.
constexpr double kFinalDecade = 0.9;

struct Outcome {
    bool pass;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double median(std::vector<double> xs) {
    std::sort(xs.begin(), xs.end());
    const auto mid = xs.size() / 2;
    return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

std::vector<double> final_column(const AggregatedTrace& agg) {
    std::vector<double> out;
    for (const auto& row : agg.per_trial) {
        out.push_back(row.back());
    }
    return out;
}

// Same seed layout as the CLI: graph and data seeds derived from one base.
ExperimentConfig desk_config(GraphKind kind, std::size_t n, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.graph.kind = kind;
    cfg.graph.n = n;
    cfg.graph.seed = derive_seed(seed, 1);
    cfg.data.seed = derive_seed(seed, 2);
    cfg.base_seed = seed;
    cfg.ticks = 50000;
    cfg.record_every = 100;
    cfg.trials = 100;
    return cfg;
}

Outcome ac1() {
    const auto start = std::chrono::steady_clock::now();
    const auto g = build_complete(500);
    const double c = spectral_gap(weighted_laplacian(g, async_edge_distribution(g)));
    const double secs = seconds_since(start);
    const bool ok = std::abs(c - kReportedCompleteGap) <= kCompleteGapTol &&
                    std::abs(c - 2.0 / 499.0) <= 1e-12 && secs < kAc1Seconds;
    return {ok, "c=" + fmt(c) + " (2/499=" + fmt(2.0 / 499.0) + ") time=" + fmt(secs) + "s"};
}

Outcome ac2() {
    int ws_in = 0, geo_in = 0, geo_accepted = 0;
    std::vector<double> ws_gaps, geo_gaps;
    for (int s = 0; s < kGapSeeds; ++s) {
        const auto ws = build_watts_strogatz(500, 4, 0.2, derive_seed(2024, s));
        const double cw = spectral_gap(weighted_laplacian(ws, async_edge_distribution(ws)));
        ws_gaps.push_back(cw);
        ws_in += cw >= kWsGapLo && cw <= kWsGapHi;
        try {
            const auto geo = build_random_geometric(500, 0.1, derive_seed(4048, s));
            ++geo_accepted;
            const double cg = spectral_gap(weighted_laplacian(geo, async_edge_distribution(geo)));
            geo_gaps.push_back(cg);
            geo_in += cg >= kGeoGapLo && cg <= kGeoGapHi;
        } catch (const generation_failure&) {
        }
    }
    const double ws_share = ws_in / static_cast<double>(kGapSeeds);
    const double geo_share = geo_accepted ? geo_in / static_cast<double>(geo_accepted) : 0.0;
    const bool ok = ws_share >= kWsShare && geo_accepted > 0 && geo_share >= kGeoShare;
    return {ok, "ws in-band " + std::to_string(ws_in) + "/" + std::to_string(kGapSeeds) +
                    " (median " + fmt(median(ws_gaps)) + "), geometric in-band " + std::to_string(geo_in) + "/" +
                    std::to_string(geo_accepted) + " (median " + fmt(geo_gaps.empty() ? 0.0 : median(geo_gaps)) +
                    ")"};
}

// Connected non-bipartite random graph on 3..20 nodes.
Graph random_small_graph(RngStream& rng) {
    const std::size_t n = 3 + rng.below(18);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    shuffle(perm.begin(), perm.end(), rng);
    std::vector<Edge> edges;
    auto add = [&](std::size_t a, std::size_t b) { edges.push_back({std::min(a, b), std::max(a, b)}); };
    for (std::size_t k = 0; k + 1 < n; ++k) {
        add(perm[k], perm[k + 1]);
    }
    add(perm[0], perm[2]);
    const double density = 0.05 + 0.5 * rng.uniform();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng.uniform() < density) {
                add(i, j);
            }
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return Graph(n, edges);
}

// Per-tick matrices built here from their definition rather than the library.
SquareMatrix tick_matrix(std::size_t n, const Edge& e, int alpha) {
    SquareMatrix w = SquareMatrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const auto i = static_cast<Eigen::Index>(e.u), j = static_cast<Eigen::Index>(e.v);
    if (alpha == 1) {
        w(i, i) = w(j, j) = 0.0;
        w(i, j) = w(j, i) = 1.0;
    } else {
        w(i, i) = w(j, j) = w(i, j) = w(j, i) = 0.5;
    }
    return w;
}

Outcome ac3() {
    RngStream rng(303);
    double worst = 0.0;
    for (int trial = 0; trial < kMatrixGraphs; ++trial) {
        const auto g = random_small_graph(rng);
        const auto n = static_cast<Eigen::Index>(g.size());
        const SquareMatrix eye = SquareMatrix::Identity(n, n);
        const SquareMatrix avg = SquareMatrix::Constant(n, n, 1.0 / static_cast<double>(n));
        for (const auto& dist : {async_edge_distribution(g), uniform_edge_distribution(g)}) {
            const SquareMatrix lp = weighted_laplacian(g, dist);
            const double c = spectral_gap(lp);
            for (int alpha : {1, 2}) {
                SquareMatrix expect = SquareMatrix::Zero(n, n);
                for (std::size_t e = 0; e < g.edge_count(); ++e) {
                    const auto w = tick_matrix(g.size(), g.edges()[e], alpha);
                    const auto lib = sample_gossip_matrix(g.edges()[e], g.size(), alpha);
                    worst = std::max(worst, (w - lib).cwiseAbs().maxCoeff());
                    const SquareMatrix target = alpha == 1 ? eye : w;
                    worst = std::max(worst, (w * w - target).cwiseAbs().maxCoeff());
                    worst = std::max(worst, (w.rowwise().sum().array() - 1.0).abs().maxCoeff());
                    worst = std::max(worst, (w.colwise().sum().array() - 1.0).abs().maxCoeff());
                    worst = std::max(worst, -w.minCoeff());
                    expect += dist[e] * w;
                }
                const SquareMatrix lib_expect = expected_gossip_matrix(g, dist, alpha);
                worst = std::max(worst, (expect - lib_expect).cwiseAbs().maxCoeff());
                worst = std::max(worst, (expect - (eye - lp / alpha)).cwiseAbs().maxCoeff());
                const Eigen::JacobiSVD<SquareMatrix> svd(expect - avg);
                const double op = svd.singularValues()(0);
                worst = std::max(worst, op - (1.0 - c / alpha));
            }
        }
    }
    return {worst <= kMatrixTol, "worst violation " + fmt(worst) + " over " + std::to_string(kMatrixGraphs) +
                                     " graphs x 2 distributions x 2 alphas"};
}

Outcome ac4() {
    RngStream rng(404);
    int wil_bad = 0, trim_bad = 0;
    double weighted_worst = 0.0;
    for (int trial = 0; trial < kOracleInstances; ++trial) {
        const std::size_t n = 2 + rng.below(11);
        std::vector<double> xs(n);
        std::vector<bool> member(n);
        for (std::size_t k = 0; k < n; ++k) {
            xs[k] = std::round(rng.uniform() * 1e6) / 1e3;
            member[k] = rng.uniform() < 0.5;
        }
        member[0] = true;
        member[1] = false;
        if (detail::has_duplicates(xs)) {
            --trial;
            continue;
        }
        std::vector<double> s1, s2;
        for (std::size_t k = 0; k < n; ++k) {
            (member[k] ? s1 : s2).push_back(xs[k]);
        }
        wil_bad += centralized_statistic(xs, wilcoxon_scores(Partition(member)), false) !=
                   oracle::pooled_rank_sum(s1, s2);
    }
    for (int trial = 0; trial < kOracleInstances; ++trial) {
        const std::size_t n = 1 + rng.below(100);
        const double alpha = 0.499 * rng.uniform();
        std::vector<double> xs(n);
        for (auto& x : xs) {
            x = rng.uniform() * 2000.0 - 1000.0;
        }
        const double ref = oracle::sort_and_trim(xs, alpha);
        if (std::abs(centralized_trimmed_mean(xs, alpha) - ref) > kWeightedTol * std::max(1.0, std::abs(ref))) {
            ++trim_bad;
        }
        if (detail::has_duplicates(xs) || n < 2) {
            continue;
        }
        const auto ranks = oracle::pairwise_ranks(xs, false);
        const TrimParams params(alpha, n);
        double total = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            total += trim_weight(ranks[k], params) * xs[k];
        }
        weighted_worst = std::max(weighted_worst, std::abs(total / static_cast<double>(n) - ref) /
                                                      std::max(1.0, std::abs(ref)));
    }
    const bool ok = wil_bad == 0 && trim_bad == 0 && weighted_worst <= kWeightedTol;
    return {ok, "wilcoxon mismatches " + std::to_string(wil_bad) + "/" + std::to_string(kOracleInstances) +
                    ", trimmed-mean mismatches " + std::to_string(trim_bad) + "/" +
                    std::to_string(kOracleInstances) + ", weighted identity worst " + fmt(weighted_worst)};
}

Outcome ac5() {
    const auto start = std::chrono::steady_clock::now();
    auto cfg = desk_config(GraphKind::watts_strogatz, 100, 5);
    const auto res = run_rank_experiment(cfg);
    const double secs = seconds_since(start);
    const double slope = loglog_slope(res.errors.front().mean_trace(), kFinalDecade);
    const bool ok = slope >= kRankSlopeLo && slope <= kRankSlopeHi && secs < kAc5Seconds;
    return {ok, "slope=" + fmt(slope) + " final error=" + fmt(res.errors.front().mean.back()) +
                    " gap=" + fmt(res.gap) + " time=" + fmt(secs) + "s"};
}

Outcome ac6() {
    const auto g = build_complete(20);
    const EdgeSampler sampler(g, async_edge_distribution(g));
    const auto data = integer_dataset(20);
    int recovered = 0;
    for (int t = 0; t < kRecoveryTrials; ++t) {
        RngStream rng(derive_seed(606, static_cast<std::uint64_t>(t)));
        const auto nodes = assign_to_nodes(data, 20, rng);
        GoRank est(nodes.values, false);
        for (int tick = 0; tick < 100000; ++tick) {
            const auto e = sampler.draw(rng);
            est.on_edge(e.u, e.v);
        }
        const auto exact = oracle::pairwise_ranks(nodes.values, false);
        bool all = true;
        for (std::size_t k = 0; k < 20; ++k) {
            all = all && std::round(est.rank_estimate(k)) == exact[k];
        }
        recovered += all;
    }
    return {recovered >= kRecoveryNeeded,
            std::to_string(recovered) + "/" + std::to_string(kRecoveryTrials) + " trials recovered exactly"};
}

Outcome ac7() {
    auto base = desk_config(GraphKind::complete, 100, 7);
    base.data.kind = DataKind::cauchy;
    base.data.n1 = 50;
    const auto complete = run_wilcoxon_experiment(base);
    const double slope = loglog_slope(complete.relative_error.mean_trace(), kFinalDecade);

    auto ws_cfg = base;
    ws_cfg.graph.kind = GraphKind::watts_strogatz;
    const auto ws = run_wilcoxon_experiment(ws_cfg);
    auto geo_cfg = base;
    geo_cfg.graph.kind = GraphKind::geometric;
    geo_cfg.graph.radius = kGeometricRadius100;
    const auto geo = run_wilcoxon_experiment(geo_cfg);

    const double mc = median(final_column(complete.relative_error));
    const double mw = median(final_column(ws.relative_error));
    const double mg = median(final_column(geo.relative_error));
    // Diagnostic only: slope of |trial-mean Z - t_n| / t_n, the error of the
    // expected estimate rather than the expected error.
    Trace bias{complete.mean_estimate.ticks, {}};
    for (double z : complete.mean_estimate.mean) {
        bias.values.push_back(std::abs(z - complete.statistic) / complete.statistic);
    }
    std::string bias_note;
    try {
        bias_note = " (trial-mean bias slope " + fmt(loglog_slope(bias, kFinalDecade)) + ")";
    } catch (const invalid_parameter&) {
    }
    const bool slope_ok = slope >= kWilcoxonSlopeLo && slope <= kWilcoxonSlopeHi;
    const bool order_ok = mc <= mw && mw <= mg;
    return {slope_ok && order_ok, "slope=" + fmt(slope) + (slope_ok ? "" : " (out of band)") + bias_note +
                                      "; median final error complete=" + fmt(mc) + " ws=" + fmt(mw) +
                                      " geometric=" + fmt(mg) + (order_ok ? "" : " (ordering violated)") +
                                      "; t_n=" + fmt(complete.statistic)};
}

Outcome ac8() {
    using hp = oracle::hp;
    RngStream rng(808);
    double worst = 0.0;
    for (int k = 0; k < kTestTriples; ++k) {
        const std::size_t n1 = 1 + rng.below(300);
        const std::size_t n2 = 1 + rng.below(300);
        const double n = static_cast<double>(n1 + n2);
        const double t_n = static_cast<double>(n1) * (n + 1.0) / 2.0 +
                           (rng.uniform() - 0.5) * 8.0 * std::sqrt(static_cast<double>(n1 * n2) * (n + 1.0) / 12.0);
        const hp mu = hp(n1) * (hp(n1 + n2) + 1) / 2;
        const hp sigma = boost::multiprecision::sqrt(hp(n1) * hp(n2) * (hp(n1 + n2) + 1) / 12);
        const double z_ref = static_cast<double>((hp(t_n) - mu) / sigma);
        const double p_ref = oracle::two_sided_p(z_ref);
        const auto got = wilcoxon_test(t_n, n1, n2);
        worst = std::max({worst, std::abs(got.z - z_ref), std::abs(got.p_value - p_ref)});
    }
    return {worst <= kTestTol, "worst |z| / |p| deviation " + fmt(worst) + " over " +
                                   std::to_string(kTestTriples) + " triples"};
}

Outcome ac9() {
    auto clean = desk_config(GraphKind::complete, 100, 9);
    clean.alpha = 0.2;
    const auto c = run_trim_experiment(clean);
    const double slope = loglog_slope(c.adaptive_error.mean_trace(), kFinalDecade);

    auto corrupt = desk_config(GraphKind::complete, 100, 9);
    corrupt.alpha = 0.4;
    corrupt.epsilon = 0.3;
    corrupt.scale = 10.0;
    const auto r = run_trim_experiment(corrupt);
    const double adaptive = r.adaptive_error.mean.back();
    const double original = r.original_error.mean.back();
    const bool slope_ok = slope >= kTrimSlopeLo && slope <= kTrimSlopeHi;
    const bool robust_ok = adaptive <= original && adaptive < r.baseline_error && original < r.baseline_error;
    return {slope_ok && robust_ok, "clean slope=" + fmt(slope) + "; corrupted final adaptive=" + fmt(adaptive) +
                                       " original=" + fmt(original) + " corrupted-mean baseline=" +
                                       fmt(r.baseline_error)};
}

int run_cli(const fs::path& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" GOSSIP_CLI_PATH "' " + args + " > /dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// Reads a CSV trace; checks the header and that every row is numeric.
bool read_trace(const fs::path& path, const std::string& header, std::size_t column, Trace& out) {
    std::ifstream in(path);
    std::string line;
    if (!std::getline(in, line) || line != header) {
        return false;
    }
    const auto fields = static_cast<std::size_t>(std::count(header.begin(), header.end(), ',')) + 1;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                return false;
            }
        }
        if (row.size() != fields) {
            return false;
        }
        out.ticks.push_back(static_cast<std::uint64_t>(row[0]));
        out.values.push_back(row[column]);
    }
    return out.ticks.size() >= 10;
}

bool trending_down(const Trace& tr) {
    const auto s = smooth_trace(tr);
    return s.values.size() >= 2 && s.values.back() < s.values.front();
}

Outcome ac10() {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir = fs::temp_directory_path() / "gossip_acceptance_ac10";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string common = " --n 500 --ticks 50000 --trials 20 --seed 10";
    std::vector<std::string> notes;
    bool ok = true;

    ok &= run_cli(dir, "rank --graph ws --compare-sampling" + common + " --out rank") == 0;
    for (const char* mode : {"async", "uniform"}) {
        Trace tr;
        const bool good = read_trace(dir / ("rank." + std::string(mode) + ".csv"), "tick,mean_error,std_error", 1, tr) &&
                          trending_down(tr);
        notes.push_back(std::string("rank.") + mode + (good ? " ok" : " bad"));
        ok &= good;
    }
    ok &= run_cli(dir, "wilcoxon --graph complete" + common + " --out wilcoxon") == 0;
    {
        Trace tr;
        const bool good =
            read_trace(dir / "wilcoxon.csv", "tick,mean_error,std_error,mean_estimate", 1, tr) && trending_down(tr);
        notes.push_back(std::string("wilcoxon") + (good ? " ok" : " bad"));
        ok &= good;
    }
    ok &= run_cli(dir, "trim --graph complete --alpha 0.4 --epsilon 0.3 --scale 10" + common + " --out trim") == 0;
    {
        Trace tr;
        const bool good = read_trace(dir / "trim.csv",
                                     "tick,mean_error,std_error,original_mean_error,original_std_error,"
                                     "corrupted_mean_error",
                                     1, tr) &&
                          trending_down(tr);
        notes.push_back(std::string("trim") + (good ? " ok" : " bad"));
        ok &= good;
    }
    const double secs = seconds_since(start);
    ok &= secs < kAc10Seconds;
    fs::remove_all(dir);
    std::string detail;
    for (const auto& n : notes) {
        detail += n + ", ";
    }
    return {ok, detail + "time=" + fmt(secs) + "s"};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"AC1 complete-graph spectral gap", ac1},
        {"AC2 random-graph spectral gaps", ac2},
        {"AC3 gossip-matrix identities", ac3},
        {"AC4 oracle equivalences", ac4},
        {"AC5 GoRank rate", ac5},
        {"AC6 GoRank exact recovery", ac6},
        {"AC7 Wilcoxon rate and topology ordering", ac7},
        {"AC8 Wilcoxon test formulas", ac8},
        {"AC9 GoTrim rate and robustness", ac9},
        {"AC10 CLI figure smoke test", ac10},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        failed += !out.pass;
        std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << std::endl;
    }
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed"))
              << std::endl;
    return failed ? 1 : 0;
}
