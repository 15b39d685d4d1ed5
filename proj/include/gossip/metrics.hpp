#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gossip/engine.hpp"
#include "gossip/errors.hpp"

namespace gossip {

/// |R_k - r_k| / n per node.
inline std::vector<double> rank_error(std::span<const double> estimates, std::span<const double> exact,
                                      std::size_t n) {
    if (estimates.size() != exact.size()) {
        throw invalid_parameter("rank_error: length mismatch");
    }
    std::vector<double> out(estimates.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::abs(estimates[k] - exact[k]) / static_cast<double>(n);
    }
    return out;
}

inline double mean_rank_error(std::span<const double> estimates, std::span<const double> exact) {
    const auto errs = rank_error(estimates, exact, exact.size());
    double total = 0.0;
    for (double e : errs) {
        total += e;
    }
    return total / static_cast<double>(errs.size());
}

/// (1/n) sum_k |Z_k - t_n| / t_n.
inline double relative_stat_error(std::span<const double> estimates, double reference) {
    if (reference == 0.0 || !std::isfinite(reference)) {
        throw invalid_parameter("relative_stat_error: reference must be finite and non-zero");
    }
    if (estimates.empty()) {
        throw invalid_parameter("relative_stat_error: no estimates");
    }
    double total = 0.0;
    for (double z : estimates) {
        total += std::abs(z - reference);
    }
    return total / (static_cast<double>(estimates.size()) * std::abs(reference));
}

/// (1/n) sum_k |Z_k - xbar_alpha|.
inline double trim_error(std::span<const double> estimates, double reference) {
    if (estimates.empty()) {
        throw invalid_parameter("trim_error: no estimates");
    }
    double total = 0.0;
    for (double z : estimates) {
        total += std::abs(z - reference);
    }
    return total / static_cast<double>(estimates.size());
}

/// n^{3/2} sqrt(u (1 - u)) with u = (r - 1) / n; zero outside u in (0, 1).
inline double rank_functional(double rank, std::size_t n) {
    const double nn = static_cast<double>(n);
    const double u = (rank - 1.0) / nn;
    if (!(u > 0.0 && u < 1.0)) {
        return 0.0;
    }
    return std::pow(nn, 1.5) * std::sqrt(u * (1.0 - u));
}

namespace detail {

inline double median_sorted(std::vector<double>& xs) {
    std::sort(xs.begin(), xs.end());
    const auto mid = xs.size() / 2;
    return xs.size() % 2 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

}  // namespace detail

inline constexpr std::size_t kDefaultSlopeBins = 20;

/// Least-squares slope of log(value) against log(tick) over the trailing
/// `window_fraction` of the points. Points are first grouped into `bins`
/// log-spaced tick bins; each bin contributes the median log tick and the
/// median log value.
inline double loglog_slope(const Trace& trace, double window_fraction, std::size_t bins = kDefaultSlopeBins) {
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) {
        throw invalid_parameter("loglog_slope: window_fraction must lie in (0, 1]");
    }
    if (trace.ticks.size() != trace.values.size()) {
        throw invalid_parameter("loglog_slope: malformed trace");
    }
    const auto total = trace.ticks.size();
    const auto keep = static_cast<std::size_t>(std::ceil(window_fraction * static_cast<double>(total)));
    if (keep < 10) {
        throw invalid_parameter("loglog_slope: need at least 10 points in the window");
    }
    const auto first = total - keep;
    std::vector<double> lt, lv;
    lt.reserve(keep);
    lv.reserve(keep);
    for (std::size_t p = first; p < total; ++p) {
        if (!(trace.values[p] > 0.0) || trace.ticks[p] == 0) {
            throw invalid_parameter("loglog_slope: non-positive value or tick in window");
        }
        lt.push_back(std::log(static_cast<double>(trace.ticks[p])));
        lv.push_back(std::log(trace.values[p]));
    }
    const double lo = lt.front();
    const double hi = lt.back();
    std::vector<double> xs, ys;
    if (bins < 2 || hi <= lo) {
        xs = lt;
        ys = lv;
    } else {
        const double width = (hi - lo) / static_cast<double>(bins);
        std::size_t p = 0;
        for (std::size_t b = 0; b < bins && p < lt.size(); ++b) {
            const double edge = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
            std::vector<double> bt, bv;
            while (p < lt.size() && lt[p] <= edge) {
                bt.push_back(lt[p]);
                bv.push_back(lv[p]);
                ++p;
            }
            if (!bt.empty()) {
                xs.push_back(detail::median_sorted(bt));
                ys.push_back(detail::median_sorted(bv));
            }
        }
    }
    if (xs.size() < 2) {
        throw invalid_parameter("loglog_slope: window spans a single tick");
    }
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    return sxy / sxx;
}

/// Geometric-bin medians of a trace (log-spaced over the whole trace); the
/// smoothed curve used for trend checks.
inline Trace smooth_trace(const Trace& trace, std::size_t bins = kDefaultSlopeBins) {
    Trace out;
    if (trace.ticks.empty()) {
        return out;
    }
    const double lo = std::log(static_cast<double>(std::max<std::uint64_t>(1, trace.ticks.front())));
    const double hi = std::log(static_cast<double>(std::max<std::uint64_t>(1, trace.ticks.back())));
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 1.0;
    std::size_t p = 0;
    for (std::size_t b = 0; b < bins && p < trace.ticks.size(); ++b) {
        const double edge = b + 1 == bins ? hi : lo + width * static_cast<double>(b + 1);
        std::vector<double> bt, bv;
        while (p < trace.ticks.size() &&
               std::log(static_cast<double>(std::max<std::uint64_t>(1, trace.ticks[p]))) <= edge) {
            bt.push_back(static_cast<double>(trace.ticks[p]));
            bv.push_back(trace.values[p]);
            ++p;
        }
        if (!bt.empty()) {
            out.ticks.push_back(static_cast<std::uint64_t>(detail::median_sorted(bt)));
            out.values.push_back(detail::median_sorted(bv));
        }
    }
    return out;
}

}  // namespace gossip
