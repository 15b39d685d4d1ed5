#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gossip/errors.hpp"
#include "gossip/rng.hpp"

namespace gossip {

/// Dense real matrix used for Laplacians and gossip matrices.
using SquareMatrix = Eigen::MatrixXd;

/// Undirected edge with 0-based endpoints, stored with u < v.
struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Simple undirected graph: no self-loops, no duplicate edges, every node
/// has at least one neighbour.
class Graph {
public:
    Graph(std::size_t n, std::vector<Edge> edges) : Graph(n, std::move(edges), unchecked_tag{}) {
        for (std::size_t k = 0; k < n_; ++k) {
            if (degree(k) == 0) {
                throw invalid_parameter("graph: node " + std::to_string(k) + " has no neighbours");
            }
        }
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    std::span<const Edge> edges() const noexcept { return edges_; }
    std::size_t degree(std::size_t k) const { return adjacency_[k].size(); }
    std::span<const std::size_t> neighbors(std::size_t k) const { return adjacency_[k]; }

    /// Laplacian L = D - A.
    SquareMatrix laplacian() const {
        SquareMatrix out = SquareMatrix::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (const auto& e : edges_) {
            add_edge_laplacian(out, e, 1.0);
        }
        return out;
    }

    static void add_edge_laplacian(SquareMatrix& m, const Edge& e, double weight) {
        const auto i = static_cast<Eigen::Index>(e.u);
        const auto j = static_cast<Eigen::Index>(e.v);
        m(i, i) += weight;
        m(j, j) += weight;
        m(i, j) -= weight;
        m(j, i) -= weight;
    }

private:
    struct unchecked_tag {};

    // Structural checks only; isolated nodes allowed. Used by the random
    // generators, which reject disconnected draws themselves.
    Graph(std::size_t n, std::vector<Edge> edges, unchecked_tag) : n_(n), adjacency_(n) {
        if (n < 2) {
            throw invalid_parameter("graph: need at least 2 nodes, got " + std::to_string(n));
        }
        for (auto& e : edges) {
            if (e.u == e.v) {
                throw invalid_parameter("graph: self-loop at node " + std::to_string(e.u));
            }
            if (e.u >= n || e.v >= n) {
                throw invalid_parameter("graph: edge endpoint out of range");
            }
            if (e.u > e.v) {
                std::swap(e.u, e.v);
            }
        }
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
            throw invalid_parameter("graph: duplicate edge");
        }
        edges_ = std::move(edges);
        for (const auto& e : edges_) {
            adjacency_[e.u].push_back(e.v);
            adjacency_[e.v].push_back(e.u);
        }
    }

    friend Graph make_unchecked_graph(std::size_t n, std::vector<Edge> edges);

    std::size_t n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

inline Graph make_unchecked_graph(std::size_t n, std::vector<Edge> edges) {
    return Graph(n, std::move(edges), Graph::unchecked_tag{});
}

inline bool is_connected(const Graph& g) {
    std::vector<bool> seen(g.size(), false);
    std::queue<std::size_t> frontier;
    frontier.push(0);
    seen[0] = true;
    std::size_t visited = 1;
    while (!frontier.empty()) {
        const auto k = frontier.front();
        frontier.pop();
        for (auto nb : g.neighbors(k)) {
            if (!seen[nb]) {
                seen[nb] = true;
                ++visited;
                frontier.push(nb);
            }
        }
    }
    return visited == g.size();
}

/// 2-colouring over every component.
inline bool is_bipartite(const Graph& g) {
    std::vector<int> colour(g.size(), -1);
    for (std::size_t start = 0; start < g.size(); ++start) {
        if (colour[start] != -1) {
            continue;
        }
        colour[start] = 0;
        std::queue<std::size_t> frontier;
        frontier.push(start);
        while (!frontier.empty()) {
            const auto k = frontier.front();
            frontier.pop();
            for (auto nb : g.neighbors(k)) {
                if (colour[nb] == -1) {
                    colour[nb] = 1 - colour[k];
                    frontier.push(nb);
                } else if (colour[nb] == colour[k]) {
                    return false;
                }
            }
        }
    }
    return true;
}

/// Throws unless the graph is usable by the gossip simulator.
inline void require_simulable(const Graph& g) {
    if (!is_connected(g)) {
        throw invalid_parameter("graph must be connected");
    }
    if (is_bipartite(g)) {
        throw invalid_parameter("graph must be non-bipartite");
    }
}

inline constexpr int kGenerationAttempts = 100;

inline Graph build_complete(std::size_t n) {
    if (n < 3) {
        throw invalid_parameter("complete graph: n must be >= 3, got " + std::to_string(n));
    }
    std::vector<Edge> edges;
    edges.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            edges.push_back({i, j});
        }
    }
    return Graph(n, std::move(edges));
}

/// Ring lattice where node i links to its k/2 successors, then each lattice
/// edge (i, i+j) has its far endpoint moved to a uniform node with
/// probability p. A rewire that would create a self-loop or a duplicate edge
/// is skipped. Draws are repeated until the graph is connected and
/// non-bipartite.
inline Graph build_watts_strogatz(std::size_t n, std::size_t k, double p, std::uint64_t seed) {
    if (k < 2 || k % 2 != 0) {
        throw invalid_parameter("watts-strogatz: k must be even and >= 2, got " + std::to_string(k));
    }
    if (n <= k) {
        throw invalid_parameter("watts-strogatz: need n > k (n=" + std::to_string(n) +
                                ", k=" + std::to_string(k) + ")");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw invalid_parameter("watts-strogatz: p must lie in [0, 1]");
    }
    RngStream rng(seed);
    for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
        std::vector<std::set<std::size_t>> adj(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 1; j <= k / 2; ++j) {
                const auto v = (i + j) % n;
                adj[i].insert(v);
                adj[v].insert(i);
            }
        }
        for (std::size_t j = 1; j <= k / 2; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                if (rng.uniform() >= p) {
                    continue;
                }
                const auto old_target = (i + j) % n;
                const auto w = static_cast<std::size_t>(rng.below(n));
                if (w == i || adj[i].contains(w)) {
                    continue;
                }
                adj[i].erase(old_target);
                adj[old_target].erase(i);
                adj[i].insert(w);
                adj[w].insert(i);
            }
        }
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (auto v : adj[i]) {
                if (i < v) {
                    edges.push_back({i, v});
                }
            }
        }
        auto g = make_unchecked_graph(n, std::move(edges));
        if (is_connected(g) && !is_bipartite(g)) {
            return g;
        }
    }
    throw generation_failure("watts-strogatz: no connected non-bipartite draw in " +
                             std::to_string(kGenerationAttempts) + " attempts (n=" + std::to_string(n) +
                             ", k=" + std::to_string(k) + ", p=" + std::to_string(p) + ")");
}

/// Random geometric graph on the unit square; resampled until connected and
/// non-bipartite.
inline Graph build_random_geometric(std::size_t n, double radius, std::uint64_t seed) {
    if (n < 3) {
        throw invalid_parameter("geometric graph: n must be >= 3, got " + std::to_string(n));
    }
    if (!(radius > 0.0)) {
        throw invalid_parameter("geometric graph: radius must be positive");
    }
    RngStream rng(seed);
    const double r2 = radius * radius;
    std::vector<double> xs(n), ys(n);
    for (int attempt = 0; attempt < kGenerationAttempts; ++attempt) {
        for (std::size_t i = 0; i < n; ++i) {
            xs[i] = rng.uniform();
            ys[i] = rng.uniform();
        }
        std::vector<Edge> edges;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double dx = xs[i] - xs[j];
                const double dy = ys[i] - ys[j];
                if (dx * dx + dy * dy <= r2) {
                    edges.push_back({i, j});
                }
            }
        }
        auto g = make_unchecked_graph(n, std::move(edges));
        if (is_connected(g) && !is_bipartite(g)) {
            return g;
        }
    }
    throw generation_failure("geometric graph: no connected non-bipartite draw in " +
                             std::to_string(kGenerationAttempts) + " attempts (n=" + std::to_string(n) +
                             ", radius=" + std::to_string(radius) + "); radius likely too small");
}

/// Activation probability of each edge, aligned with Graph::edges().
class EdgeDistribution {
public:
    explicit EdgeDistribution(std::vector<double> probabilities) : p_(std::move(probabilities)) {
        if (p_.empty()) {
            throw invalid_parameter("edge distribution: empty");
        }
        // Neumaier summation keeps the 1e-12 check meaningful for ~1e5 edges.
        double sum = 0.0;
        double comp = 0.0;
        for (double x : p_) {
            if (!(x > 0.0 && x <= 1.0)) {
                throw invalid_parameter("edge distribution: probabilities must lie in (0, 1]");
            }
            const double t = sum + x;
            comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
            sum = t;
        }
        if (std::abs(sum + comp - 1.0) > 1e-12) {
            throw invalid_parameter("edge distribution: probabilities do not sum to 1");
        }
    }

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t e) const { return p_[e]; }
    std::span<const double> probabilities() const noexcept { return p_; }

private:
    std::vector<double> p_;
};

/// Each node wakes with probability 1/n and picks a uniform neighbour:
/// p_e = (1/n)(1/d_i + 1/d_j).
inline EdgeDistribution async_edge_distribution(const Graph& g) {
    const double n = static_cast<double>(g.size());
    std::vector<double> p;
    p.reserve(g.edge_count());
    for (const auto& e : g.edges()) {
        p.push_back((1.0 / static_cast<double>(g.degree(e.u)) + 1.0 / static_cast<double>(g.degree(e.v))) / n);
    }
    return EdgeDistribution(std::move(p));
}

inline EdgeDistribution uniform_edge_distribution(const Graph& g) {
    return EdgeDistribution(std::vector<double>(g.edge_count(), 1.0 / static_cast<double>(g.edge_count())));
}

inline void require_aligned(const Graph& g, const EdgeDistribution& dist) {
    if (dist.size() != g.edge_count()) {
        throw invalid_parameter("edge distribution has " + std::to_string(dist.size()) +
                                " entries but graph has " + std::to_string(g.edge_count()) + " edges");
    }
}

/// L(P) = sum_e p_e L_e.
inline SquareMatrix weighted_laplacian(const Graph& g, const EdgeDistribution& dist) {
    require_aligned(g, dist);
    const auto n = static_cast<Eigen::Index>(g.size());
    SquareMatrix out = SquareMatrix::Zero(n, n);
    const auto edges = g.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        Graph::add_edge_laplacian(out, edges[e], dist[e]);
    }
    return out;
}

namespace detail {

inline void require_symmetric(const SquareMatrix& m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw invalid_parameter("matrix must be square and non-empty");
    }
    if (!m.allFinite()) {
        throw invalid_parameter("matrix has non-finite entries");
    }
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw invalid_parameter("matrix is not symmetric");
    }
}

// Ascending eigenvalues of a symmetric matrix.
inline Eigen::VectorXd symmetric_eigenvalues(const SquareMatrix& m) {
    require_symmetric(m);
    Eigen::SelfAdjointEigenSolver<SquareMatrix> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw invalid_parameter("eigenvalue decomposition did not converge");
    }
    return solver.eigenvalues();
}

}  // namespace detail

/// Second-smallest eigenvalue of a symmetric PSD Laplacian.
inline double spectral_gap(const SquareMatrix& laplacian) {
    const auto evals = detail::symmetric_eigenvalues(laplacian);
    if (evals.size() < 2) {
        throw invalid_parameter("spectral gap needs order >= 2");
    }
    return evals(1);
}

/// W_alpha = I - (1/alpha) L(P). alpha = 1 is the swap walk, alpha = 2 the
/// pairwise averaging.
inline SquareMatrix expected_gossip_matrix(const Graph& g, const EdgeDistribution& dist, int alpha) {
    if (alpha != 1 && alpha != 2) {
        throw invalid_parameter("gossip matrix: alpha must be 1 or 2");
    }
    const auto n = static_cast<Eigen::Index>(g.size());
    return SquareMatrix::Identity(n, n) - weighted_laplacian(g, dist) / static_cast<double>(alpha);
}

/// Per-activation matrix W_alpha(t) = I - L_e / alpha.
inline SquareMatrix sample_gossip_matrix(const Edge& edge, std::size_t n, int alpha) {
    if (alpha != 1 && alpha != 2) {
        throw invalid_parameter("gossip matrix: alpha must be 1 or 2");
    }
    if (edge.u == edge.v) {
        throw invalid_parameter("gossip matrix: edge endpoints must differ");
    }
    if (edge.u >= n || edge.v >= n) {
        throw invalid_parameter("gossip matrix: edge endpoint out of range");
    }
    const auto order = static_cast<Eigen::Index>(n);
    SquareMatrix out = SquareMatrix::Identity(order, order);
    SquareMatrix le = SquareMatrix::Zero(order, order);
    Graph::add_edge_laplacian(le, edge, 1.0);
    out -= le / static_cast<double>(alpha);
    return out;
}

/// Second-largest eigenvalue of a symmetric matrix (lambda_2 of W_alpha).
inline double second_largest_eigenvalue(const SquareMatrix& m) {
    const auto evals = detail::symmetric_eigenvalues(m);
    if (evals.size() < 2) {
        throw invalid_parameter("need order >= 2");
    }
    return evals(evals.size() - 2);
}

/// Operator norm of W - (1/n) 1 1^T for symmetric W.
inline double deflated_operator_norm(const SquareMatrix& w) {
    const auto n = w.rows();
    const SquareMatrix centred = w - SquareMatrix::Constant(n, n, 1.0 / static_cast<double>(n));
    return detail::symmetric_eigenvalues(centred).cwiseAbs().maxCoeff();
}

}  // namespace gossip
