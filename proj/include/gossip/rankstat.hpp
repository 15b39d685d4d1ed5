#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gossip/errors.hpp"
#include "gossip/gorank.hpp"
#include "gossip/normal.hpp"

namespace gossip {

/// Two-sample split of the nodes: member(k) is true iff X_k belongs to S1.
class Partition {
public:
    explicit Partition(std::vector<bool> in_first) : member_(std::move(in_first)) {
        n1_ = static_cast<std::size_t>(std::count(member_.begin(), member_.end(), true));
        if (n1_ == 0 || n1_ == member_.size()) {
            throw invalid_parameter("partition: both samples must be non-empty");
        }
    }

    std::size_t size() const noexcept { return member_.size(); }
    std::size_t n1() const noexcept { return n1_; }
    std::size_t n2() const noexcept { return member_.size() - n1_; }
    bool member(std::size_t k) const { return member_[k]; }

    Partition swapped() const {
        std::vector<bool> flipped(member_.size());
        for (std::size_t k = 0; k < member_.size(); ++k) {
            flipped[k] = !member_[k];
        }
        return Partition(std::move(flipped));
    }

private:
    std::vector<bool> member_;
    std::size_t n1_ = 0;
};

/// Score functions of a rank statistic T_n = sum_k f(r_k) g(X_k).
/// `transform` receives the node index as well as the value so that sample
/// membership can be node metadata.
struct ScorePair {
    std::string label;
    std::function<double(double)> rank_score;
    std::function<double(std::size_t, double)> transform;
};

/// f = id, g = indicator of S1.
inline ScorePair wilcoxon_scores(const Partition& part) {
    return {"wilcoxon", [](double r) { return r; },
            [part](std::size_t k, double) { return part.member(k) ? 1.0 : 0.0; }};
}

/// f(r) = Phi^{-1}(clamp(r, 1, n) / (n + 1)), g = indicator of S1.
inline ScorePair vanderwaerden_scores(const Partition& part) {
    const double n = static_cast<double>(part.size());
    return {"van-der-waerden",
            [n](double r) { return normal_quantile(std::clamp(r, 1.0, n) / (n + 1.0)); },
            [part](std::size_t k, double) { return part.member(k) ? 1.0 : 0.0; }};
}

/// Exact T_n from centralized ranks.
inline double centralized_statistic(std::span<const double> observations, const ScorePair& scores,
                                    bool ties_mode) {
    const auto ranks = exact_ranks(observations, ties_mode);
    double total = 0.0;
    for (std::size_t k = 0; k < ranks.size(); ++k) {
        total += scores.rank_score(ranks[k]) * scores.transform(k, observations[k]);
    }
    return total;
}

/// Rank source that always reports fixed ranks. Isolates the averaging part
/// of the statistic estimators from rank estimation noise.
class FixedRanks {
public:
    explicit FixedRanks(std::vector<double> ranks) : ranks_(std::move(ranks)) {}

    std::size_t size() const noexcept { return ranks_.size(); }
    double update(std::size_t k) const { return ranks_[k]; }
    void swap_auxiliary(std::size_t, std::size_t) {}
    double rank_estimate(std::size_t k) const { return ranks_[k]; }

private:
    std::vector<double> ranks_;
};

/// Gossip estimation of a rank statistic. Each node carries Z_k, its last
/// weight W_k = n f(R_k), and the cached g(X_k). When a node's rank estimate
/// moves, the weight change times g(X_k) is injected into Z_k before the pair
/// averages, so sum_k Z_k == sum_k W_k g(X_k) at all times.
template <RankEstimator Rank = GoRank>
class RankStatistic {
public:
    RankStatistic(std::span<const double> observations, ScorePair scores, Rank ranks)
        : scores_(std::move(scores)), ranks_(std::move(ranks)) {
        const std::size_t n = observations.size();
        if (ranks_.size() != n) {
            throw invalid_parameter("rank statistic: rank source size mismatch");
        }
        g_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            g_[k] = scores_.transform(k, observations[k]);
            if (!std::isfinite(g_[k])) {
                throw estimator_failure("rank statistic: g(X) not finite at node " + std::to_string(k));
            }
        }
        z_.assign(n, 0.0);
        w_.assign(n, 0.0);
    }

    std::size_t size() const noexcept { return z_.size(); }

    void on_edge(std::size_t i, std::size_t j) {
        if (i == j) {
            throw invalid_parameter("rank statistic: edge endpoints must differ");
        }
        inject(i);
        inject(j);
        const double avg = 0.5 * (z_[i] + z_[j]);
        z_[i] = avg;
        z_[j] = avg;
        ranks_.swap_auxiliary(i, j);
    }

    std::span<const double> estimates() const noexcept { return z_; }
    std::span<const double> weights() const noexcept { return w_; }
    std::span<const double> transformed() const noexcept { return g_; }
    const Rank& ranks() const noexcept { return ranks_; }

private:
    void inject(std::size_t k) {
        const double r = ranks_.update(k);
        const double w = static_cast<double>(z_.size()) * scores_.rank_score(r);
        if (!std::isfinite(w)) {
            throw estimator_failure("rank statistic: f(R) not finite at node " + std::to_string(k));
        }
        z_[k] += (w - w_[k]) * g_[k];
        w_[k] = w;
    }

    ScorePair scores_;
    Rank ranks_;
    std::vector<double> g_;
    std::vector<double> z_;
    std::vector<double> w_;
};

inline RankStatistic<GoRank> make_rank_statistic(std::vector<double> observations, ScorePair scores,
                                                 bool ties_mode) {
    GoRank ranks(observations, ties_mode);
    return RankStatistic<GoRank>(observations, std::move(scores), std::move(ranks));
}

struct WilcoxonTest {
    double mean = 0.0;
    double stddev = 0.0;
    double z = 0.0;
    double p_value = 1.0;
};

/// Normal-approximation rank-sum test on the S1 rank sum t_n:
/// mu = n1 (n + 1) / 2, sigma = sqrt(n1 n2 (n + 1) / 12), p = 2 (1 - Phi(|z|)).
inline WilcoxonTest wilcoxon_test(double t_n, std::size_t n1, std::size_t n2) {
    if (n1 < 1 || n2 < 1) {
        throw invalid_parameter("wilcoxon_test: n1 and n2 must be >= 1");
    }
    const double a = static_cast<double>(n1);
    const double b = static_cast<double>(n2);
    const double n = a + b;
    WilcoxonTest out;
    out.mean = a * (n + 1.0) / 2.0;
    out.stddev = std::sqrt(a * b * (n + 1.0) / 12.0);
    out.z = (t_n - out.mean) / out.stddev;
    out.p_value = 2.0 * normal_sf(std::abs(out.z));
    return out;
}

}  // namespace gossip
