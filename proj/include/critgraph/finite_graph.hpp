#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <limits>
#include <span>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "critgraph/errors.hpp"
#include "critgraph/kernel.hpp"
#include "critgraph/rng.hpp"

namespace critgraph {

using NodeId = std::uint32_t;
using NodePair = std::pair<NodeId, NodeId>;

/// Simple undirected graph: edge list plus compressed adjacency.
class SparseGraph {
public:
    SparseGraph() = default;

    SparseGraph(std::size_t n, std::vector<NodePair> edges) : n_(n), edges_(std::move(edges)) {
        offsets_.assign(n_ + 1, 0);
        for (const auto& [u, v] : edges_) {
            if (u >= n_ || v >= n_ || u == v) {
                throw parameter_error("sparse graph edges must join two distinct vertices in range");
            }
            ++offsets_[u + 1];
            ++offsets_[v + 1];
        }
        std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
        adjacency_.resize(2 * edges_.size());
        std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
        for (const auto& [u, v] : edges_) {
            adjacency_[fill[u]++] = v;
            adjacency_[fill[v]++] = u;
        }
    }

    [[nodiscard]] std::size_t vertex_count() const noexcept { return n_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const std::vector<NodePair>& edges() const noexcept { return edges_; }
    [[nodiscard]] std::span<const NodeId> neighbors(std::size_t v) const {
        return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
    }
    [[nodiscard]] std::size_t degree(std::size_t v) const { return offsets_[v + 1] - offsets_[v]; }

private:
    std::size_t n_ = 0;
    std::vector<NodePair> edges_;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> adjacency_;
};

namespace detail {

/// Edges of G(n, p) by geometric skipping over the pairs (v, w), w < v, in order; expected
/// work is proportional to n plus the number of edges.
inline std::vector<NodePair> gnp_edges(RngStream& stream, std::size_t n, double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw parameter_error("edge probability must lie in (0, 1)");
    }
    if (n > std::numeric_limits<NodeId>::max()) {
        throw parameter_error("too many vertices");
    }
    std::vector<NodePair> edges;
    edges.reserve(static_cast<std::size_t>(p * static_cast<double>(n) * static_cast<double>(n) / 2.0 * 1.1) + 16);
    const double log_q = std::log1p(-p);
    std::uint64_t v = 1;
    std::int64_t w = -1;
    while (v < n) {
        const double skip = std::floor(std::log(stream.uniform()) / log_q);
        if (skip > 1e18) {
            break;
        }
        w += 1 + static_cast<std::int64_t>(skip);
        while (w >= static_cast<std::int64_t>(v) && v < n) {
            w -= static_cast<std::int64_t>(v);
            ++v;
        }
        if (v < n) {
            edges.emplace_back(static_cast<NodeId>(v), static_cast<NodeId>(w));
        }
    }
    return edges;
}

struct UnionFind {
    explicit UnionFind(std::size_t n) : parent(n), size(n, 1) { std::iota(parent.begin(), parent.end(), NodeId{0}); }

    NodeId find(NodeId x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    void unite(NodeId a, NodeId b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return;
        }
        if (size[a] < size[b]) {
            std::swap(a, b);
        }
        parent[b] = a;
        size[a] += size[b];
    }

    std::vector<NodeId> parent;
    std::vector<std::uint32_t> size;
};

} // namespace detail

inline SparseGraph sample_gnp(RngStream& stream, std::size_t n, double p) {
    return SparseGraph(n, detail::gnp_edges(stream, n, p));
}

/// p = 1/n + lambda n^{-4/3}.
inline double critical_p(std::size_t n, double lambda) {
    const double nd = static_cast<double>(n);
    return 1.0 / nd + lambda * std::pow(nd, -4.0 / 3.0);
}

/// A connected component relabeled to 0..size-1; `vertices` maps back to the host graph.
struct ComponentSubgraph {
    std::vector<NodeId> vertices;
    std::vector<NodePair> edges;

    [[nodiscard]] std::size_t size() const noexcept { return vertices.size(); }
};

namespace detail {

/// Components ordered by their smallest vertex; `keep` selects which roots to extract.
template <class Keep>
std::vector<ComponentSubgraph> extract_components(std::size_t n, std::span<const NodePair> edges, UnionFind& uf,
                                                  Keep keep) {
    std::vector<std::int64_t> slot(n, -1);
    std::vector<NodeId> local(n, 0);
    std::vector<ComponentSubgraph> out;
    for (NodeId v = 0; v < n; ++v) {
        const NodeId r = uf.find(v);
        if (slot[r] < 0) {
            if (!keep(r)) {
                slot[r] = -2;
                continue;
            }
            slot[r] = static_cast<std::int64_t>(out.size());
            out.emplace_back();
        }
        if (slot[r] == -2) {
            continue;
        }
        auto& c = out[static_cast<std::size_t>(slot[r])];
        local[v] = static_cast<NodeId>(c.vertices.size());
        c.vertices.push_back(v);
    }
    for (const auto& [u, v] : edges) {
        const std::int64_t s = slot[uf.find(u)];
        if (s >= 0) {
            out[static_cast<std::size_t>(s)].edges.emplace_back(local[u], local[v]);
        }
    }
    return out;
}

} // namespace detail

inline std::vector<ComponentSubgraph> connected_components(const SparseGraph& g) {
    detail::UnionFind uf(g.vertex_count());
    for (const auto& [u, v] : g.edges()) {
        uf.unite(u, v);
    }
    return detail::extract_components(g.vertex_count(), g.edges(), uf, [](NodeId) { return true; });
}

/// All components of one G(n, p) sample, ordered by smallest vertex.
inline std::vector<ComponentSubgraph> sample_gnp_components(RngStream& stream, std::size_t n, double p) {
    return connected_components(sample_gnp(stream, n, p));
}

/// Cycle structure of a connected graph. Lengths are in edges; `normalized` multiplies
/// them by n^{-1/3} and divides by sqrt(sigma_hat), sigma_hat = size n^{-2/3}, which
/// leaves length / sqrt(size).
struct ComponentSummary {
    std::size_t size = 0;
    std::size_t edge_count = 0;
    std::size_t surplus = 0;
    std::size_t core_vertices = 0;
    std::size_t core_edges = 0;
    Multigraph kernel;
    std::vector<std::size_t> path_lengths; ///< per kernel edge, in kernel edge order
    std::optional<std::size_t> cycle_length;
    double rescale = 1.0;    ///< n^{-1/3} once attached to a host of size n
    double sigma_hat = 0.0;  ///< size n^{-2/3}
    std::vector<double> normalized;

    void attach_host(std::size_t n) {
        const double nd = static_cast<double>(n);
        rescale = std::pow(nd, -1.0 / 3.0);
        sigma_hat = static_cast<double>(size) * std::pow(nd, -2.0 / 3.0);
        normalized.clear();
        const double f = rescale / std::sqrt(sigma_hat);
        if (cycle_length) {
            normalized.push_back(static_cast<double>(*cycle_length) * f);
        }
        for (const std::size_t l : path_lengths) {
            normalized.push_back(static_cast<double>(l) * f);
        }
    }
};

/// Surplus, 2-core (by repeatedly deleting degree-1 vertices) and kernel (by contracting
/// maximal paths of degree-2 core vertices).
inline ComponentSummary decompose(const ComponentSubgraph& c) {
    const std::size_t n = c.vertices.size();
    ComponentSummary s;
    s.size = n;
    s.edge_count = c.edges.size();
    if (n == 0) {
        throw parameter_error("empty component");
    }
    if (c.edges.size() + 1 < n) {
        throw parameter_error("component is not connected");
    }
    s.surplus = c.edges.size() + 1 - n;

    // adjacency with edge ids
    std::vector<std::size_t> offsets(n + 1, 0);
    for (const auto& [u, v] : c.edges) {
        ++offsets[u + 1];
        ++offsets[v + 1];
    }
    std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
    std::vector<std::pair<NodeId, std::uint32_t>> adj(2 * c.edges.size());
    {
        std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
        for (std::uint32_t e = 0; e < c.edges.size(); ++e) {
            const auto [u, v] = c.edges[e];
            adj[fill[u]++] = {v, e};
            adj[fill[v]++] = {u, e};
        }
    }

    std::vector<std::size_t> degree(n);
    std::vector<char> removed(n, 0);
    std::vector<NodeId> queue;
    for (NodeId v = 0; v < n; ++v) {
        degree[v] = offsets[v + 1] - offsets[v];
        if (degree[v] <= 1) {
            queue.push_back(v);
        }
    }
    while (!queue.empty()) {
        const NodeId v = queue.back();
        queue.pop_back();
        if (removed[v]) {
            continue;
        }
        removed[v] = 1;
        for (std::size_t i = offsets[v]; i < offsets[v + 1]; ++i) {
            const NodeId w = adj[i].first;
            if (!removed[w] && --degree[w] == 1) {
                queue.push_back(w);
            }
        }
    }
    std::vector<char> core_edge(c.edges.size(), 0);
    for (std::uint32_t e = 0; e < c.edges.size(); ++e) {
        core_edge[e] = !removed[c.edges[e].first] && !removed[c.edges[e].second];
        s.core_edges += static_cast<std::size_t>(core_edge[e]);
    }
    for (NodeId v = 0; v < n; ++v) {
        s.core_vertices += static_cast<std::size_t>(!removed[v]);
    }
    if (s.surplus == 0) {
        return s;
    }
    if (s.surplus == 1) {
        s.cycle_length = s.core_edges;
        return s;
    }

    std::vector<std::int64_t> kernel_id(n, -1);
    std::size_t kernel_n = 0;
    for (NodeId v = 0; v < n; ++v) {
        if (!removed[v] && degree[v] >= 3) {
            kernel_id[v] = static_cast<std::int64_t>(kernel_n++);
        }
    }
    std::vector<char> used(c.edges.size(), 0);
    Multigraph::EdgeList kedges;
    for (NodeId u = 0; u < n; ++u) {
        if (kernel_id[u] < 0) {
            continue;
        }
        for (std::size_t i = offsets[u]; i < offsets[u + 1]; ++i) {
            auto [w, e] = adj[i];
            if (!core_edge[e] || used[e]) {
                continue;
            }
            used[e] = 1;
            std::size_t len = 1;
            while (kernel_id[w] < 0) {
                std::uint32_t next_e = e;
                NodeId next_w = w;
                for (std::size_t j = offsets[w]; j < offsets[w + 1]; ++j) {
                    if (core_edge[adj[j].second] && adj[j].second != e) {
                        next_w = adj[j].first;
                        next_e = adj[j].second;
                        break;
                    }
                }
                e = next_e;
                w = next_w;
                used[e] = 1;
                ++len;
            }
            kedges.emplace_back(static_cast<std::size_t>(kernel_id[u]), static_cast<std::size_t>(kernel_id[w]));
            s.path_lengths.push_back(len);
        }
    }
    s.kernel = Multigraph(kernel_n, std::move(kedges));
    return s;
}

/// Raised when the graph budget runs out; carries whatever was collected.
class partial_harvest_error : public std::runtime_error {
public:
    partial_harvest_error(std::vector<ComponentSummary> collected, std::size_t graphs)
        : std::runtime_error("harvest budget exhausted after " + std::to_string(graphs) + " graphs with " +
                             std::to_string(collected.size()) + " components"),
          collected_(std::move(collected)), graphs_(graphs) {}

    [[nodiscard]] const std::vector<ComponentSummary>& collected() const noexcept { return collected_; }
    [[nodiscard]] std::size_t graphs() const noexcept { return graphs_; }

private:
    std::vector<ComponentSummary> collected_;
    std::size_t graphs_;
};

struct HarvestConfig {
    std::size_t n = 0;
    double lambda = 0.0;
    std::size_t surplus = 0;
    double window_lo = 0.9; ///< in units of n^{2/3}
    double window_hi = 1.1;
    std::size_t count = 1;
    std::size_t max_graphs = 1'000'000;
    std::size_t jobs = 1;
};

struct HarvestResult {
    std::vector<ComponentSummary> components;
    std::size_t graphs = 0;
};

namespace detail {

/// Components of graph number `index` that pass the size window and surplus filter.
inline std::vector<ComponentSummary> harvest_one(const RngStream& base, std::size_t index, const HarvestConfig& cfg,
                                                 double p, std::size_t lo, std::size_t hi) {
    RngStream stream = base.child("graph", index);
    const std::vector<NodePair> edges = gnp_edges(stream, cfg.n, p);
    UnionFind uf(cfg.n);
    std::vector<std::uint32_t> edge_count(cfg.n, 0);
    for (const auto& [u, v] : edges) {
        uf.unite(u, v);
    }
    for (const auto& [u, v] : edges) {
        ++edge_count[uf.find(u)];
    }
    auto keep = [&](NodeId r) {
        const std::size_t size = uf.size[r];
        return size >= lo && size <= hi && edge_count[r] + 1 == size + cfg.surplus;
    };
    bool any = false;
    for (NodeId v = 0; v < cfg.n && !any; ++v) {
        any = uf.parent[v] == v && keep(v);
    }
    std::vector<ComponentSummary> out;
    if (!any) {
        return out;
    }
    for (const ComponentSubgraph& c : extract_components(cfg.n, edges, uf, keep)) {
        ComponentSummary s = decompose(c);
        s.attach_host(cfg.n);
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace detail

/// Samples G(n, 1/n + lambda n^{-4/3}) repeatedly and keeps components with size in
/// [lo n^{2/3}, hi n^{2/3}] and the requested surplus until `count` are collected. Graph i
/// uses stream.child("graph", i) and results are merged in graph order, so the output does
/// not depend on `jobs`.
inline HarvestResult harvest_conditioned(const RngStream& stream, const HarvestConfig& cfg) {
    if (cfg.n < 2 || cfg.count < 1 || !(cfg.window_lo <= cfg.window_hi) || cfg.window_lo < 0.0) {
        throw parameter_error("harvest needs n >= 2, count >= 1 and a nonempty window");
    }
    const double scale = std::pow(static_cast<double>(cfg.n), 2.0 / 3.0);
    const auto lo = static_cast<std::size_t>(std::ceil(cfg.window_lo * scale));
    const auto hi = static_cast<std::size_t>(std::floor(cfg.window_hi * scale));
    if (lo > hi) {
        throw parameter_error("size window contains no integer");
    }
    const double p = critical_p(cfg.n, cfg.lambda);
    const std::size_t jobs = std::max<std::size_t>(1, cfg.jobs);

    HarvestResult result;
    std::vector<std::vector<ComponentSummary>> batch(jobs);
    while (result.components.size() < cfg.count) {
        if (result.graphs >= cfg.max_graphs) {
            throw partial_harvest_error(std::move(result.components), result.graphs);
        }
        const std::size_t width = std::min(jobs, cfg.max_graphs - result.graphs);
        if (width == 1) {
            batch[0] = detail::harvest_one(stream, result.graphs, cfg, p, lo, hi);
        } else {
            std::vector<std::thread> workers;
            workers.reserve(width);
            for (std::size_t j = 0; j < width; ++j) {
                workers.emplace_back([&, j] { batch[j] = detail::harvest_one(stream, result.graphs + j, cfg, p, lo, hi); });
            }
            for (auto& t : workers) {
                t.join();
            }
        }
        for (std::size_t j = 0; j < width && result.components.size() < cfg.count; ++j) {
            ++result.graphs;
            for (auto& s : batch[j]) {
                if (result.components.size() < cfg.count) {
                    result.components.push_back(std::move(s));
                }
            }
        }
    }
    return result;
}

} // namespace critgraph
