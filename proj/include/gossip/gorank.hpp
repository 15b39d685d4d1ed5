#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gossip/errors.hpp"
#include "gossip/graph.hpp"

namespace gossip {

/// Rank source pluggable into the statistic estimators: update(k) performs
/// node k's local rank update and returns its current rank estimate;
/// swap_auxiliary(i, j) ends the tick.
template <class R>
concept RankEstimator = requires(R& r, const R& cr, std::size_t k) {
    { r.update(k) } -> std::convertible_to<double>;
    r.swap_auxiliary(k, k);
    { cr.rank_estimate(k) } -> std::convertible_to<double>;
    { cr.size() } -> std::convertible_to<std::size_t>;
};

namespace detail {

inline void require_finite(std::span<const double> xs, const char* who) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
        if (!std::isfinite(xs[k])) {
            throw invalid_input(std::string(who) + ": observation " + std::to_string(k) + " is not finite");
        }
    }
}

inline bool has_duplicates(std::span<const double> xs) {
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

}  // namespace detail

/// Centralized ranks. No-ties mode: r_k = 1 + #{l : X_l < X_k} and duplicates
/// are rejected. Ties mode: mid-ranks, r_k = 1/2 + #{X_l < X_k} + #{X_l == X_k}/2.
inline std::vector<double> exact_ranks(std::span<const double> observations, bool ties_mode) {
    if (observations.empty()) {
        throw invalid_parameter("exact_ranks: empty input");
    }
    detail::require_finite(observations, "exact_ranks");
    const std::size_t n = observations.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return observations[a] < observations[b]; });
    std::vector<double> ranks(n);
    std::size_t start = 0;
    while (start < n) {
        std::size_t stop = start + 1;
        while (stop < n && observations[order[stop]] == observations[order[start]]) {
            ++stop;
        }
        const auto tied = stop - start;
        if (tied > 1 && !ties_mode) {
            throw invalid_input("exact_ranks: duplicated value in no-ties mode");
        }
        const double r = 0.5 + static_cast<double>(start) + 0.5 * static_cast<double>(tied);
        for (std::size_t p = start; p < stop; ++p) {
            ranks[order[p]] = r;
        }
        start = stop;
    }
    return ranks;
}

/// Asynchronous GoRank. Each node keeps its observation X_k, an auxiliary
/// observation Y_k that random-walks through the graph by swaps, the running
/// mean R'_k of the comparison indicators and the update counter C_k.
class GoRank {
public:
    GoRank(std::vector<double> observations, bool ties_mode)
        : x_(std::move(observations)), ties_(ties_mode) {
        if (x_.size() < 2) {
            throw invalid_parameter("gorank: need at least 2 observations");
        }
        detail::require_finite(x_, "gorank");
        if (!ties_ && detail::has_duplicates(x_)) {
            throw invalid_input("gorank: duplicated observations need ties mode");
        }
        y_ = x_;
        normalized_.assign(x_.size(), 0.0);
        counter_.assign(x_.size(), 1);
    }

    std::size_t size() const noexcept { return x_.size(); }
    bool ties_mode() const noexcept { return ties_; }

    /// Running-mean update of node k against its current auxiliary value.
    double update(std::size_t k) {
        const double c = static_cast<double>(counter_[k]);
        normalized_[k] = (1.0 - 1.0 / c) * normalized_[k] + comparison(k) / c;
        ++counter_[k];
        return rank_estimate(k);
    }

    void swap_auxiliary(std::size_t i, std::size_t j) { std::swap(y_[i], y_[j]); }

    void on_edge(std::size_t i, std::size_t j) {
        if (i == j) {
            throw invalid_parameter("gorank: edge endpoints must differ");
        }
        update(i);
        update(j);
        swap_auxiliary(i, j);
    }

    /// Indicator consumed by the next update of node k.
    double comparison(std::size_t k) const {
        if (x_[k] > y_[k]) {
            return 1.0;
        }
        return ties_ && x_[k] == y_[k] ? 0.5 : 0.0;
    }

    /// R_k = n R'_k + 1, or n R'_k + 1/2 in ties mode.
    double rank_estimate(std::size_t k) const {
        return static_cast<double>(x_.size()) * normalized_[k] + (ties_ ? 0.5 : 1.0);
    }

    std::vector<double> rank_estimates() const {
        std::vector<double> out(x_.size());
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = rank_estimate(k);
        }
        return out;
    }

    std::span<const double> observations() const noexcept { return x_; }
    std::span<const double> auxiliary() const noexcept { return y_; }
    std::span<const double> normalized_ranks() const noexcept { return normalized_; }
    std::span<const std::uint64_t> counters() const noexcept { return counter_; }

private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> normalized_;
    std::vector<std::uint64_t> counter_;
    bool ties_;
};

/// The synchronous baseline keeps GoRank's updates and only changes edge
/// sampling to uniform over E.
inline EdgeDistribution sync_variant_distribution(const Graph& g) { return uniform_edge_distribution(g); }

}  // namespace gossip
