#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "critgraph/metric_tree.hpp"

namespace critgraph::oracle {

/// Reference quotient distance by exhaustive enumeration of simple paths.
///
/// Every edge of `t` is cut at the identification points and the two query points; the
/// pieces form a small weighted multigraph whose identified nodes are merged. The answer is
/// the shortest simple path between the nodes of p and q, found by trying them all.
inline double quotient_distance(const MetricTree& t, std::span<const PointPair> pairs, const PointLocation& p,
                                const PointLocation& q, std::size_t* node_count = nullptr) {
    const auto edges = t.edges();
    std::vector<std::vector<double>> cuts(edges.size());
    auto add_cut = [&](const PointLocation& x) { cuts[x.edge].push_back(std::clamp(x.offset, 0.0, edges[x.edge].length)); };
    for (const auto& [a, b] : pairs) {
        add_cut(a);
        add_cut(b);
    }
    add_cut(p);
    add_cut(q);

    // nodes: tree vertices first, then interior cut points
    std::size_t nodes = t.vertex_count();
    struct Arc {
        std::size_t a;
        std::size_t b;
        double len;
    };
    std::vector<Arc> arcs;
    std::vector<std::vector<std::pair<double, std::size_t>>> point_nodes(edges.size());
    for (EdgeId e = 0; e < edges.size(); ++e) {
        auto& c = cuts[e];
        std::sort(c.begin(), c.end());
        c.erase(std::unique(c.begin(), c.end()), c.end());
        std::size_t prev = edges[e].parent;
        double prev_off = 0.0;
        for (const double off : c) {
            std::size_t node = 0;
            if (off <= 0.0) {
                node = edges[e].parent;
            } else if (off >= edges[e].length) {
                continue;
            } else {
                node = nodes++;
                arcs.push_back({prev, node, off - prev_off});
                prev = node;
                prev_off = off;
            }
            point_nodes[e].emplace_back(off, node);
        }
        arcs.push_back({prev, edges[e].child, edges[e].length - prev_off});
        point_nodes[e].emplace_back(edges[e].length, edges[e].child);
    }
    auto node_of = [&](const PointLocation& x) {
        const double off = std::clamp(x.offset, 0.0, edges[x.edge].length);
        if (off <= 0.0) {
            return edges[x.edge].parent;
        }
        for (const auto& [o, n] : point_nodes[x.edge]) {
            if (o == off) {
                return n;
            }
        }
        return edges[x.edge].child;
    };

    std::vector<std::size_t> cls(nodes);
    std::iota(cls.begin(), cls.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (cls[x] != x) {
            x = cls[x];
        }
        return x;
    };
    for (const auto& [a, b] : pairs) {
        const std::size_t ra = find(node_of(a));
        const std::size_t rb = find(node_of(b));
        if (ra != rb) {
            cls[std::max(ra, rb)] = std::min(ra, rb);
        }
    }
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes);
    std::size_t merged = 0;
    for (std::size_t v = 0; v < nodes; ++v) {
        merged += static_cast<std::size_t>(find(v) == v);
    }
    for (const Arc& arc : arcs) {
        const std::size_t a = find(arc.a);
        const std::size_t b = find(arc.b);
        if (a != b) {
            adj[a].emplace_back(b, arc.len);
            adj[b].emplace_back(a, arc.len);
        }
    }
    if (node_count != nullptr) {
        *node_count = merged;
    }

    const std::size_t source = find(node_of(p));
    const std::size_t target = find(node_of(q));
    double best = std::numeric_limits<double>::infinity();
    std::vector<char> on_path(nodes, 0);
    auto dfs = [&](auto&& self, std::size_t v, double length) -> void {
        if (v == target) {
            best = std::min(best, length);
            return;
        }
        on_path[v] = 1;
        for (const auto& [w, len] : adj[v]) {
            if (!on_path[w]) {
                self(self, w, length + len);
            }
        }
        on_path[v] = 0;
    };
    dfs(dfs, source, 0.0);
    return best;
}

} // namespace critgraph::oracle
