#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gossip/errors.hpp"
#include "gossip/graph.hpp"
#include "gossip/rng.hpp"

namespace gossip {

enum class Sample : std::uint8_t { first, second };

/// Values with optional two-sample labels. Labels, when present, align with
/// values and travel with them when the data is scattered over nodes.
struct Dataset {
    std::vector<double> values;
    std::vector<Sample> labels;
    std::string provenance;

    std::size_t size() const noexcept { return values.size(); }
    bool labelled() const noexcept { return !labels.empty(); }

    void validate() const {
        if (values.empty()) {
            throw invalid_parameter("dataset: empty");
        }
        if (labelled() && labels.size() != values.size()) {
            throw invalid_parameter("dataset: labels do not align with values");
        }
    }
};

inline Dataset integer_dataset(std::size_t n) {
    if (n < 2) {
        throw invalid_parameter("integer dataset: n must be >= 2");
    }
    Dataset d;
    d.values.resize(n);
    std::iota(d.values.begin(), d.values.end(), 1.0);
    d.provenance = "integers 1.." + std::to_string(n);
    return d;
}

/// Inverse-CDF Cauchy draw.
inline double cauchy_from_uniform(double u, double location, double scale) {
    return location + scale * std::tan(std::numbers::pi * (u - 0.5));
}

/// n1 draws Cauchy(loc1, scale) labelled S1 followed by n2 draws
/// Cauchy(loc2, scale) labelled S2.
inline Dataset cauchy_two_sample(std::size_t n1, std::size_t n2, double loc1, double loc2, double scale,
                                 std::uint64_t seed) {
    if (n1 < 1 || n2 < 1) {
        throw invalid_parameter("cauchy two-sample: n1 and n2 must be >= 1");
    }
    if (!(scale > 0.0)) {
        throw invalid_parameter("cauchy two-sample: scale must be positive");
    }
    RngStream rng(seed);
    Dataset d;
    d.values.reserve(n1 + n2);
    for (std::size_t k = 0; k < n1 + n2; ++k) {
        const bool first = k < n1;
        d.values.push_back(cauchy_from_uniform(rng.uniform_open(), first ? loc1 : loc2, scale));
        d.labels.push_back(first ? Sample::first : Sample::second);
    }
    std::ostringstream os;
    os << "cauchy two-sample n1=" << n1 << " loc1=" << loc1 << " n2=" << n2 << " loc2=" << loc2
       << " scale=" << scale << " seed=" << seed;
    d.provenance = os.str();
    return d;
}

struct Contamination {
    Dataset data;
    std::vector<std::size_t> indices;  // touched positions, in selection order
    bool empty = false;                // floor(eps n) == 0, data returned unchanged
};

namespace detail {

inline void require_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 0.5)) {
        throw invalid_parameter("contamination: epsilon must lie in (0, 1/2)");
    }
}

// floor(eps n) distinct positions by partial Fisher-Yates.
inline std::vector<std::size_t> choose_indices(std::size_t n, std::size_t count, RngStream& rng) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        const auto j = i + static_cast<std::size_t>(rng.below(n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

inline std::size_t contaminated_count(double epsilon, std::size_t n) {
    return static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(n)));
}

}  // namespace detail

/// Multiplies floor(eps n) uniformly chosen values by s.
inline Contamination scale_corrupt(const Dataset& d, double epsilon, double s, std::uint64_t seed) {
    d.validate();
    detail::require_epsilon(epsilon);
    Contamination out{d, {}, false};
    const auto count = detail::contaminated_count(epsilon, d.size());
    if (count == 0) {
        out.empty = true;
        return out;
    }
    RngStream rng(seed);
    out.indices = detail::choose_indices(d.size(), count, rng);
    for (auto k : out.indices) {
        out.data.values[k] *= s;
    }
    std::ostringstream os;
    os << d.provenance << "; scale-corrupted eps=" << epsilon << " s=" << s << " seed=" << seed;
    out.data.provenance = os.str();
    return out;
}

using OutlierSampler = std::function<double(RngStream&)>;

/// Replaces floor(eps n) uniformly chosen values by outlier draws.
inline Contamination huber_contaminate(const Dataset& d, double epsilon, const OutlierSampler& outliers,
                                       std::uint64_t seed) {
    d.validate();
    detail::require_epsilon(epsilon);
    Contamination out{d, {}, false};
    const auto count = detail::contaminated_count(epsilon, d.size());
    if (count == 0) {
        out.empty = true;
        return out;
    }
    RngStream rng(seed);
    out.indices = detail::choose_indices(d.size(), count, rng);
    for (auto k : out.indices) {
        out.data.values[k] = outliers(rng);
    }
    out.data.provenance = d.provenance + "; huber-contaminated";
    return out;
}

/// Observations as held by the nodes after scattering.
struct NodeData {
    std::vector<double> values;
    std::vector<Sample> labels;     // empty for unlabelled datasets
    std::vector<std::size_t> origin; // origin[k] = dataset index placed at node k
};

/// Uniform random bijection dataset -> nodes.
inline NodeData assign_to_nodes(const Dataset& d, std::size_t nodes, RngStream& rng) {
    d.validate();
    if (d.size() != nodes) {
        throw invalid_parameter("assign_to_nodes: dataset has " + std::to_string(d.size()) +
                                " values for " + std::to_string(nodes) + " nodes");
    }
    NodeData out;
    out.origin.resize(nodes);
    std::iota(out.origin.begin(), out.origin.end(), std::size_t{0});
    shuffle(out.origin.begin(), out.origin.end(), rng);
    out.values.reserve(nodes);
    for (auto idx : out.origin) {
        out.values.push_back(d.values[idx]);
        if (d.labelled()) {
            out.labels.push_back(d.labels[idx]);
        }
    }
    return out;
}

inline NodeData assign_to_nodes(const Dataset& d, const Graph& g, std::uint64_t seed) {
    RngStream rng(seed);
    return assign_to_nodes(d, g.size(), rng);
}

/// CSV with header `index,value,label`; label is S1, S2 or empty.
inline void write_dataset_csv(std::ostream& os, const Dataset& d) {
    d.validate();
    os << "index,value,label\n";
    os << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (std::size_t k = 0; k < d.size(); ++k) {
        os << k << ',' << d.values[k] << ',';
        if (d.labelled()) {
            os << (d.labels[k] == Sample::first ? "S1" : "S2");
        }
        os << '\n';
    }
}

inline Dataset read_dataset_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("index,value,label", 0) != 0) {
        throw invalid_parameter("dataset csv: missing header");
    }
    Dataset d;
    bool any_label = false;
    bool any_unlabelled = false;
    std::size_t expected = 0;
    while (std::getline(is, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string idx, value, label;
        std::getline(row, idx, ',');
        std::getline(row, value, ',');
        std::getline(row, label);
        if (!label.empty() && label.back() == '\r') {
            label.pop_back();
        }
        unsigned long long parsed_index = 0;
        try {
            parsed_index = std::stoull(idx);
            d.values.push_back(std::stod(value));
        } catch (const std::logic_error&) {
            throw invalid_parameter("dataset csv: malformed row '" + line + "'");
        }
        if (parsed_index != expected) {
            throw invalid_parameter("dataset csv: indices must be 0..n-1 in order");
        }
        ++expected;
        if (label == "S1" || label == "S2") {
            any_label = true;
            d.labels.push_back(label == "S1" ? Sample::first : Sample::second);
        } else if (label.empty()) {
            any_unlabelled = true;
        } else {
            throw invalid_parameter("dataset csv: unknown label '" + label + "'");
        }
    }
    if (any_label && any_unlabelled) {
        throw invalid_parameter("dataset csv: labels must be given for all rows or none");
    }
    d.provenance = "csv";
    d.validate();
    return d;
}

}  // namespace gossip
