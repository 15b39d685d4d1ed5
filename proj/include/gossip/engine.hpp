#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "gossip/errors.hpp"
#include "gossip/graph.hpp"
#include "gossip/rng.hpp"

namespace gossip {

/// Anything that reacts to edge activations. Read-outs (estimates, rank
/// estimates, ...) are estimator-specific and must be const.
template <class E>
concept Estimator = requires(E& est, const E& cest, std::size_t i, std::size_t j) {
    est.on_edge(i, j);
    { cest.size() } -> std::convertible_to<std::size_t>;
};

/// Draws edges with probability p_e via a cumulative table.
class EdgeSampler {
public:
    EdgeSampler(const Graph& g, const EdgeDistribution& dist) : edges_(g.edges().begin(), g.edges().end()) {
        require_aligned(g, dist);
        cumulative_.reserve(dist.size());
        double acc = 0.0;
        for (double p : dist.probabilities()) {
            acc += p;
            cumulative_.push_back(acc);
        }
        total_ = acc;
    }

    Edge draw(RngStream& rng) const {
        const double u = rng.uniform() * total_;
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) {
            --it;
        }
        return edges_[static_cast<std::size_t>(it - cumulative_.begin())];
    }

    std::size_t size() const noexcept { return edges_.size(); }

private:
    std::vector<Edge> edges_;
    std::vector<double> cumulative_;
    double total_ = 1.0;
};

inline Edge draw_edge(const EdgeSampler& sampler, RngStream& rng) { return sampler.draw(rng); }

/// Metric snapshots of a single run (or a single metric of one trial).
struct Trace {
    std::vector<std::uint64_t> ticks;
    std::vector<double> values;
};

/// Pointwise mean and sample standard deviation over trials.
struct AggregatedTrace {
    std::vector<std::uint64_t> ticks;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<std::vector<double>> per_trial;

    Trace mean_trace() const { return {ticks, mean}; }
};

template <class E>
using Metric = std::function<double(const E&)>;

/// Runs exactly `ticks` activations. Every metric is evaluated after tick
/// record_every, 2*record_every, ... and after the final tick.
template <Estimator E>
std::vector<Trace> run(E& est, const EdgeSampler& sampler, std::uint64_t ticks, std::uint64_t record_every,
                       std::span<const Metric<E>> metrics, RngStream& rng) {
    if (ticks < 1) {
        throw invalid_parameter("run: ticks must be >= 1");
    }
    if (record_every < 1) {
        throw invalid_parameter("run: record_every must be >= 1");
    }
    const std::size_t snapshots = static_cast<std::size_t>(ticks / record_every + (ticks % record_every ? 1 : 0));
    std::vector<Trace> out(metrics.size());
    for (auto& tr : out) {
        tr.ticks.reserve(snapshots);
        tr.values.reserve(snapshots);
    }
    for (std::uint64_t t = 1; t <= ticks; ++t) {
        const Edge e = sampler.draw(rng);
        try {
            est.on_edge(e.u, e.v);
        } catch (const std::exception& ex) {
            throw estimator_failure(std::string(ex.what()) + " (tick " + std::to_string(t) + ")", t);
        }
        if (t % record_every == 0 || t == ticks) {
            for (std::size_t m = 0; m < metrics.size(); ++m) {
                const double v = metrics[m](est);
                if (!std::isfinite(v)) {
                    throw estimator_failure("non-finite metric value (tick " + std::to_string(t) + ")", t);
                }
                out[m].ticks.push_back(t);
                out[m].values.push_back(v);
            }
        }
    }
    return out;
}

template <Estimator E>
Trace run(E& est, const EdgeSampler& sampler, std::uint64_t ticks, std::uint64_t record_every, Metric<E> metric,
          RngStream& rng) {
    std::vector<Metric<E>> metrics{std::move(metric)};
    return std::move(run(est, sampler, ticks, record_every, std::span<const Metric<E>>(metrics), rng).front());
}

/// Aggregates same-shaped traces (one per trial).
inline AggregatedTrace aggregate(std::span<const Trace> trials) {
    if (trials.empty()) {
        throw invalid_parameter("aggregate: no trials");
    }
    AggregatedTrace out;
    out.ticks = trials.front().ticks;
    const std::size_t points = out.ticks.size();
    for (const auto& tr : trials) {
        if (tr.ticks != out.ticks || tr.values.size() != points) {
            throw invalid_parameter("aggregate: trials recorded at different ticks");
        }
        out.per_trial.push_back(tr.values);
    }
    out.mean.assign(points, 0.0);
    out.stddev.assign(points, 0.0);
    const double count = static_cast<double>(trials.size());
    for (std::size_t p = 0; p < points; ++p) {
        double sum = 0.0;
        for (const auto& tr : trials) {
            sum += tr.values[p];
        }
        const double mean = sum / count;
        double ss = 0.0;
        for (const auto& tr : trials) {
            ss += (tr.values[p] - mean) * (tr.values[p] - mean);
        }
        out.mean[p] = mean;
        out.stddev[p] = trials.size() > 1 ? std::sqrt(ss / (count - 1.0)) : 0.0;
    }
    return out;
}

inline unsigned default_thread_count() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Runs `trials` independent trials, trial t seeded with derive_seed(base_seed, t).
/// `trial_fn(RngStream&, std::size_t trial)` returns one Trace per metric.
/// Results do not depend on the thread count.
template <class TrialFn>
std::vector<AggregatedTrace> run_trials(TrialFn&& trial_fn, std::size_t trials, std::uint64_t base_seed,
                                        unsigned threads = default_thread_count()) {
    if (trials < 1) {
        throw invalid_parameter("run_trials: trials must be >= 1");
    }
    std::vector<std::vector<Trace>> results(trials);
    std::vector<std::exception_ptr> errors(trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < trials; t = next++) {
            try {
                RngStream rng(derive_seed(base_seed, t));
                results[t] = trial_fn(rng, t);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(worker);
        }
    }
    for (auto& err : errors) {
        if (err) {
            std::rethrow_exception(err);
        }
    }
    const std::size_t metric_count = results.front().size();
    std::vector<AggregatedTrace> out;
    out.reserve(metric_count);
    for (std::size_t m = 0; m < metric_count; ++m) {
        std::vector<Trace> column;
        column.reserve(trials);
        for (auto& r : results) {
            if (r.size() != metric_count) {
                throw invalid_parameter("run_trials: trials returned different metric counts");
            }
            column.push_back(std::move(r[m]));
        }
        out.push_back(aggregate(column));
    }
    return out;
}

}  // namespace gossip
