#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gossip/errors.hpp"
#include "gossip/gorank.hpp"

namespace gossip {

/// Trimming level alpha with the derived m = floor(alpha n), inclusion
/// endpoints a = m + 1/2, b = n - m + 1/2 and normalizer (n - 2m) / n.
/// alpha = 0 (no trimming) is accepted and degenerates to the plain mean.
class TrimParams {
public:
    TrimParams(double alpha, std::size_t n) : alpha_(alpha), n_(n) {
        if (!(alpha >= 0.0 && alpha < 0.5)) {
            throw invalid_parameter("trim: alpha must lie in [0, 1/2)");
        }
        if (n < 1) {
            throw invalid_parameter("trim: n must be >= 1");
        }
        m_ = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
        if (2 * m_ >= n) {
            throw invalid_parameter("trim: nothing left after trimming");
        }
    }

    double alpha() const noexcept { return alpha_; }
    std::size_t n() const noexcept { return n_; }
    std::size_t trimmed() const noexcept { return m_; }
    double lower() const noexcept { return static_cast<double>(m_) + 0.5; }
    double upper() const noexcept { return static_cast<double>(n_ - m_) + 0.5; }
    double normalizer() const noexcept {
        return static_cast<double>(n_ - 2 * m_) / static_cast<double>(n_);
    }

private:
    double alpha_;
    std::size_t n_;
    std::size_t m_ = 0;
};

/// n f(r) for the trimmed mean: 1/c_{n,alpha} inside the open interval (a, b),
/// 0 outside. On integer ranks this is I{m+1 <= r <= n-m} n / (n - 2m).
inline double trim_weight(double rank, const TrimParams& params) {
    return rank > params.lower() && rank < params.upper() ? 1.0 / params.normalizer() : 0.0;
}

/// Distance of an integer rank to the nearest interval endpoint.
inline double gamma_diagnostic(double rank, const TrimParams& params) {
    return std::min(std::abs(rank - params.lower()), std::abs(rank - params.upper()));
}

/// Sort, drop floor(alpha n) values at each end, average the rest.
inline double centralized_trimmed_mean(std::span<const double> values, double alpha) {
    if (values.empty()) {
        throw invalid_parameter("trimmed mean: empty input");
    }
    const TrimParams params(alpha, values.size());
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto m = params.trimmed();
    const auto first = sorted.begin() + static_cast<std::ptrdiff_t>(m);
    const auto last = sorted.end() - static_cast<std::ptrdiff_t>(m);
    return std::accumulate(first, last, 0.0) / static_cast<double>(last - first);
}

/// Adaptive GoTrim. N_k tracks the weighted sum (the original GoTrim output),
/// M_k tracks the weight mass. Both are corrected with the weight change and
/// then averaged over the active pair, so sum N = sum W X and sum M = sum W.
template <RankEstimator Rank = GoRank>
class GoTrim {
public:
    GoTrim(std::vector<double> observations, TrimParams params, Rank ranks)
        : x_(std::move(observations)), params_(params), ranks_(std::move(ranks)) {
        if (ranks_.size() != x_.size() || params_.n() != x_.size()) {
            throw invalid_parameter("gotrim: size mismatch");
        }
        numer_.assign(x_.size(), 0.0);
        mass_.assign(x_.size(), 0.0);
        w_.assign(x_.size(), 0.0);
    }

    std::size_t size() const noexcept { return x_.size(); }
    const TrimParams& params() const noexcept { return params_; }

    void on_edge(std::size_t i, std::size_t j) {
        if (i == j) {
            throw invalid_parameter("gotrim: edge endpoints must differ");
        }
        inject(i);
        inject(j);
        const double n_avg = 0.5 * (numer_[i] + numer_[j]);
        const double m_avg = 0.5 * (mass_[i] + mass_[j]);
        numer_[i] = numer_[j] = n_avg;
        mass_[i] = mass_[j] = m_avg;
        ranks_.swap_auxiliary(i, j);
    }

    /// N_k / max(1, M_k) when adaptive, otherwise N_k.
    double estimate(std::size_t k, bool adaptive) const {
        return adaptive ? numer_[k] / std::max(1.0, mass_[k]) : numer_[k];
    }

    std::vector<double> estimates(bool adaptive) const {
        std::vector<double> out(x_.size());
        for (std::size_t k = 0; k < out.size(); ++k) {
            out[k] = estimate(k, adaptive);
        }
        return out;
    }

    std::span<const double> weighted_sums() const noexcept { return numer_; }
    std::span<const double> weight_mass() const noexcept { return mass_; }
    std::span<const double> weights() const noexcept { return w_; }
    std::span<const double> observations() const noexcept { return x_; }
    const Rank& ranks() const noexcept { return ranks_; }

private:
    void inject(std::size_t k) {
        const double w = trim_weight(ranks_.update(k), params_);
        const double delta = w - w_[k];
        numer_[k] += delta * x_[k];
        mass_[k] += delta;
        w_[k] = w;
    }

    std::vector<double> x_;
    TrimParams params_;
    Rank ranks_;
    std::vector<double> numer_;
    std::vector<double> mass_;
    std::vector<double> w_;
};

inline GoTrim<GoRank> make_gotrim(std::vector<double> observations, double alpha, bool ties_mode) {
    TrimParams params(alpha, observations.size());
    GoRank ranks(observations, ties_mode);
    return GoTrim<GoRank>(std::move(observations), params, std::move(ranks));
}

}  // namespace gossip
