#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "critgraph/detail/format.hpp"
#include "critgraph/errors.hpp"

namespace critgraph {

using VertexId = std::size_t;
using EdgeId = std::size_t;
inline constexpr std::size_t no_id = std::numeric_limits<std::size_t>::max();

/// Edges are oriented away from the root of their component.
struct Edge {
    VertexId parent;
    VertexId child;
    double length;
};

/// A point on an edge, `offset` measured from the endpoint nearer the root.
struct PointLocation {
    EdgeId edge;
    double offset;
};

struct Mark {
    std::string name;
    VertexId vertex;
};

/// Finite rooted tree with positive edge lengths.
///
/// Several roots make a forest; that is how the skeleton of a glued space holds the separate
/// pieces that identifications later join. Marks are always anchored at vertices: marking an
/// interior point splits its edge first, so the vertex set is static between mutations.
class MetricTree {
public:
    MetricTree() = default;

    static MetricTree single_point() {
        MetricTree t;
        t.add_root();
        return t;
    }

    /// One edge of the given length hanging from a root.
    static MetricTree segment(double length) {
        MetricTree t;
        const VertexId r = t.add_root();
        t.add_edge(r, length);
        return t;
    }

    /// Rebuilds a tree from raw parts; edge i must connect parent -> child, every vertex has
    /// at most one parent edge, and the parent relation must be acyclic.
    static MetricTree from_parts(std::size_t vertex_count, std::vector<Edge> edges) {
        MetricTree t;
        t.parent_edge_.assign(vertex_count, no_id);
        t.edges_ = std::move(edges);
        for (EdgeId e = 0; e < t.edges_.size(); ++e) {
            const Edge& edge = t.edges_[e];
            if (edge.parent >= vertex_count || edge.child >= vertex_count) {
                throw format_error("edge endpoint out of range");
            }
            if (!(edge.length > 0.0)) {
                throw format_error("edge lengths must be positive");
            }
            if (t.parent_edge_[edge.child] != no_id) {
                throw format_error("vertex has two parent edges");
            }
            t.parent_edge_[edge.child] = e;
            t.total_length_ += edge.length;
        }
        std::vector<std::vector<EdgeId>> children(vertex_count);
        for (EdgeId e = 0; e < t.edges_.size(); ++e) {
            children[t.edges_[e].parent].push_back(e);
        }
        t.depth_.assign(vertex_count, 0.0);
        t.root_.assign(vertex_count, no_id);
        std::size_t reached = 0;
        for (VertexId v = 0; v < vertex_count; ++v) {
            if (t.parent_edge_[v] != no_id) {
                continue;
            }
            t.roots_.push_back(v);
            std::vector<VertexId> stack{v};
            t.root_[v] = v;
            while (!stack.empty()) {
                const VertexId u = stack.back();
                stack.pop_back();
                ++reached;
                for (const EdgeId e : children[u]) {
                    const VertexId c = t.edges_[e].child;
                    t.depth_[c] = t.depth_[u] + t.edges_[e].length;
                    t.root_[c] = v;
                    stack.push_back(c);
                }
            }
        }
        if (reached != vertex_count) {
            throw format_error("parent relation contains a cycle");
        }
        return t;
    }

    VertexId add_root() {
        const VertexId v = parent_edge_.size();
        parent_edge_.push_back(no_id);
        depth_.push_back(0.0);
        root_.push_back(v);
        roots_.push_back(v);
        return v;
    }

    /// Hangs a new edge below `parent`; returns the new child vertex (its edge id is the
    /// last one, edges().size() - 1).
    VertexId add_edge(VertexId parent, double length) {
        check_vertex(parent);
        if (!(length > 0.0) || !std::isfinite(length)) {
            throw parameter_error("edge length must be positive and finite");
        }
        const VertexId child = parent_edge_.size();
        const EdgeId e = edges_.size();
        edges_.push_back({parent, child, length});
        parent_edge_.push_back(e);
        depth_.push_back(depth_[parent] + length);
        root_.push_back(root_[parent]);
        total_length_ += length;
        return child;
    }

    /// Splits edge `e` at an interior offset. Edge `e` keeps the upper piece; a new edge
    /// (id edges().size() - 1 afterwards) carries the lower piece to the old child.
    VertexId split_edge(EdgeId e, double offset) {
        check_edge(e);
        Edge& edge = edges_[e];
        if (!(offset > 0.0) || !(offset < edge.length)) {
            throw location_error("split offset must be strictly inside the edge");
        }
        const VertexId mid = parent_edge_.size();
        const VertexId old_child = edge.child;
        const double lower = edge.length - offset;
        edge.child = mid;
        edge.length = offset;
        parent_edge_.push_back(e);
        depth_.push_back(depth_[edge.parent] + offset);
        root_.push_back(root_[edge.parent]);
        const EdgeId lower_id = edges_.size();
        edges_.push_back({mid, old_child, lower});
        parent_edge_[old_child] = lower_id;
        // total length is unchanged up to rounding of offset + lower
        return mid;
    }

    /// The vertex at `p`, splitting the edge when `p` is interior.
    VertexId vertex_at(const PointLocation& p) {
        check_location(p);
        const Edge& edge = edges_[p.edge];
        if (p.offset <= 0.0) {
            return edge.parent;
        }
        if (p.offset >= edge.length) {
            return edge.child;
        }
        return split_edge(p.edge, p.offset);
    }

    /// Attaches a new pendant edge of `length` at `p`; returns the new leaf.
    VertexId attach(const PointLocation& p, double length) { return add_edge(vertex_at(p), length); }

    void add_mark(std::string name, VertexId v) {
        check_vertex(v);
        marks_.push_back({std::move(name), v});
    }

    VertexId add_mark(std::string name, const PointLocation& p) {
        const VertexId v = vertex_at(p);
        add_mark(std::move(name), v);
        return v;
    }

    [[nodiscard]] std::optional<VertexId> find_mark(std::string_view name) const {
        for (const Mark& m : marks_) {
            if (m.name == name) {
                return m.vertex;
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] VertexId mark(std::string_view name) const {
        if (auto v = find_mark(name)) {
            return *v;
        }
        throw location_error("no mark named '" + std::string(name) + "'");
    }

    [[nodiscard]] std::span<const Mark> marks() const noexcept { return marks_; }
    [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }
    [[nodiscard]] const Edge& edge(EdgeId e) const {
        check_edge(e);
        return edges_[e];
    }
    [[nodiscard]] std::size_t vertex_count() const noexcept { return parent_edge_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] std::span<const VertexId> roots() const noexcept { return roots_; }
    [[nodiscard]] std::size_t component_count() const noexcept { return roots_.size(); }
    [[nodiscard]] double total_length() const noexcept { return total_length_; }

    /// Parent edge of `v`, or no_id for a root.
    [[nodiscard]] EdgeId parent_edge(VertexId v) const {
        check_vertex(v);
        return parent_edge_[v];
    }
    [[nodiscard]] double depth(VertexId v) const {
        check_vertex(v);
        return depth_[v];
    }
    [[nodiscard]] VertexId root_of(VertexId v) const {
        check_vertex(v);
        return root_[v];
    }

    /// Index of v's component in roots().
    [[nodiscard]] std::size_t component_of(VertexId v) const {
        const VertexId r = root_of(v);
        return static_cast<std::size_t>(std::find(roots_.begin(), roots_.end(), r) - roots_.begin());
    }

    /// Vertices of degree one that are not roots.
    [[nodiscard]] std::vector<VertexId> leaves() const {
        std::vector<std::size_t> out_degree(vertex_count(), 0);
        for (const Edge& e : edges_) {
            ++out_degree[e.parent];
        }
        std::vector<VertexId> out;
        for (VertexId v = 0; v < vertex_count(); ++v) {
            if (parent_edge_[v] != no_id && out_degree[v] == 0) {
                out.push_back(v);
            }
        }
        return out;
    }

    /// Location of a vertex: the far end of its parent edge, or offset 0 on its first child
    /// edge for a root.
    [[nodiscard]] PointLocation location_of(VertexId v) const {
        check_vertex(v);
        if (parent_edge_[v] != no_id) {
            return {parent_edge_[v], edges_[parent_edge_[v]].length};
        }
        for (EdgeId e = 0; e < edges_.size(); ++e) {
            if (edges_[e].parent == v) {
                return {e, 0.0};
            }
        }
        throw location_error("isolated vertex has no edge location");
    }

    void check_location(const PointLocation& p) const {
        if (p.edge >= edges_.size()) {
            throw location_error("edge id " + std::to_string(p.edge) + " out of range");
        }
        const double len = edges_[p.edge].length;
        if (!(p.offset >= 0.0) || p.offset > len * (1.0 + 1e-12)) {
            throw location_error("offset outside edge " + std::to_string(p.edge));
        }
    }

    /// Distance between two vertices; +inf when they lie in different components.
    [[nodiscard]] double vertex_distance(VertexId u, VertexId v) const {
        check_vertex(u);
        check_vertex(v);
        if (root_[u] != root_[v]) {
            return std::numeric_limits<double>::infinity();
        }
        const double du = depth_[u];
        const double dv = depth_[v];
        VertexId a = u;
        VertexId b = v;
        while (a != b) {
            const double da = depth_[a];
            const double db = depth_[b];
            if (da >= db) {
                a = edges_[parent_edge_[a]].parent;
            }
            if (db >= da) {
                b = edges_[parent_edge_[b]].parent;
            }
        }
        return du + dv - 2.0 * depth_[a];
    }

    /// Geodesic distance between two points; +inf across components.
    [[nodiscard]] double point_distance(const PointLocation& p, const PointLocation& q) const {
        check_location(p);
        check_location(q);
        if (p.edge == q.edge) {
            return std::abs(p.offset - q.offset);
        }
        const Edge& ep = edges_[p.edge];
        const Edge& eq = edges_[q.edge];
        const double p_len = std::min(p.offset, ep.length);
        const double q_len = std::min(q.offset, eq.length);
        const std::pair<VertexId, double> p_ends[2] = {{ep.parent, p_len}, {ep.child, ep.length - p_len}};
        const std::pair<VertexId, double> q_ends[2] = {{eq.parent, q_len}, {eq.child, eq.length - q_len}};
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [pv, pd] : p_ends) {
            for (const auto& [qv, qd] : q_ends) {
                best = std::min(best, pd + vertex_distance(pv, qv) + qd);
            }
        }
        return best;
    }

    /// Copy with every length multiplied by `factor`.
    [[nodiscard]] MetricTree rescaled(double factor) const {
        if (!(factor > 0.0) || !std::isfinite(factor)) {
            throw parameter_error("rescale factor must be positive");
        }
        MetricTree t = *this;
        for (Edge& e : t.edges_) {
            e.length *= factor;
        }
        for (double& d : t.depth_) {
            d *= factor;
        }
        t.total_length_ *= factor;
        return t;
    }

    struct Offsets {
        std::size_t vertex;
        std::size_t edge;
    };

    /// Appends `other` as extra components; its ids shift by the returned offsets and its
    /// marks are prefixed with `mark_prefix`.
    Offsets append(const MetricTree& other, std::string_view mark_prefix = {}) {
        const Offsets off{vertex_count(), edge_count()};
        for (VertexId v = 0; v < other.vertex_count(); ++v) {
            parent_edge_.push_back(other.parent_edge_[v] == no_id ? no_id : other.parent_edge_[v] + off.edge);
            depth_.push_back(other.depth_[v]);
            root_.push_back(other.root_[v] + off.vertex);
        }
        for (const Edge& e : other.edges_) {
            edges_.push_back({e.parent + off.vertex, e.child + off.vertex, e.length});
        }
        for (const VertexId r : other.roots_) {
            roots_.push_back(r + off.vertex);
        }
        for (const Mark& m : other.marks_) {
            marks_.push_back({std::string(mark_prefix) + m.name, m.vertex + off.vertex});
        }
        total_length_ += other.total_length_;
        return off;
    }

    /// Sum of edge lengths recomputed from scratch.
    [[nodiscard]] double summed_length() const noexcept {
        double s = 0.0;
        for (const Edge& e : edges_) {
            s += e.length;
        }
        return s;
    }

private:
    void check_vertex(VertexId v) const {
        if (v >= parent_edge_.size()) {
            throw location_error("vertex id " + std::to_string(v) + " out of range");
        }
    }
    void check_edge(EdgeId e) const {
        if (e >= edges_.size()) {
            throw location_error("edge id " + std::to_string(e) + " out of range");
        }
    }

    std::vector<Edge> edges_;
    std::vector<EdgeId> parent_edge_;
    std::vector<double> depth_;
    std::vector<VertexId> root_;
    std::vector<VertexId> roots_;
    std::vector<Mark> marks_;
    double total_length_ = 0.0;
};

/// Length of the unique path between p and q. Points in different components have no
/// path and raise location_error.
inline double tree_distance(const MetricTree& t, const PointLocation& p, const PointLocation& q) {
    const double d = t.point_distance(p, q);
    if (!std::isfinite(d)) {
        throw location_error("points lie in different components");
    }
    return d;
}

inline MetricTree rescale(const MetricTree& t, double factor) { return t.rescaled(factor); }

/// A skeleton forest plus finitely many vertex identifications; distances are the quotient
/// (glued) shortest-path metric.
///
/// Every quotient geodesic alternates tree geodesics with jumps across identified pairs, so
/// it suffices to close the identified vertices ("portals") under shortest paths once
/// (Floyd-Warshall) and then combine with tree distances at query time.
class GluedSpace {
public:
    GluedSpace() = default;

    GluedSpace(MetricTree skeleton, std::vector<std::pair<VertexId, VertexId>> identified)
        : skeleton_(std::move(skeleton)), identified_(std::move(identified)) {
        for (const auto& [a, b] : identified_) {
            if (a >= skeleton_.vertex_count() || b >= skeleton_.vertex_count()) {
                throw location_error("identified vertex out of range");
            }
            add_portal(a);
            add_portal(b);
        }
        const std::size_t n = portals_.size();
        portal_dist_.assign(n * n, std::numeric_limits<double>::infinity());
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                portal_dist_[i * n + j] = skeleton_.vertex_distance(portals_[i], portals_[j]);
            }
        }
        for (const auto& [a, b] : identified_) {
            const std::size_t i = portal_index(a);
            const std::size_t j = portal_index(b);
            portal_dist_[i * n + j] = 0.0;
            portal_dist_[j * n + i] = 0.0;
        }
        for (std::size_t k = 0; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) {
                const double ik = portal_dist_[i * n + k];
                if (!std::isfinite(ik)) {
                    continue;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double via = ik + portal_dist_[k * n + j];
                    if (via < portal_dist_[i * n + j]) {
                        portal_dist_[i * n + j] = via;
                    }
                }
            }
        }
    }

    [[nodiscard]] const MetricTree& skeleton() const noexcept { return skeleton_; }
    [[nodiscard]] std::span<const std::pair<VertexId, VertexId>> identifications() const noexcept {
        return identified_;
    }

    [[nodiscard]] double distance(const PointLocation& p, const PointLocation& q) const {
        double best = skeleton_.point_distance(p, q);
        const std::size_t n = portals_.size();
        if (n == 0) {
            return best;
        }
        std::vector<double> from_p(n);
        std::vector<double> to_q(n);
        for (std::size_t i = 0; i < n; ++i) {
            const PointLocation portal = portal_location_[i];
            from_p[i] = skeleton_.point_distance(p, portal);
            to_q[i] = skeleton_.point_distance(portal, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(from_p[i])) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                best = std::min(best, from_p[i] + portal_dist_[i * n + j] + to_q[j]);
            }
        }
        return best;
    }

    [[nodiscard]] double vertex_distance(VertexId u, VertexId v) const {
        if (u == v) {
            return 0.0;
        }
        double best = skeleton_.vertex_distance(u, v);
        const std::size_t n = portals_.size();
        for (std::size_t i = 0; i < n; ++i) {
            const double a = skeleton_.vertex_distance(u, portals_[i]);
            if (!std::isfinite(a)) {
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                best = std::min(best, a + portal_dist_[i * n + j] + skeleton_.vertex_distance(portals_[j], v));
            }
        }
        return best;
    }

    /// Number of independent cycles of the quotient: |E| - |V/~| + #components.
    [[nodiscard]] std::size_t cycle_rank() const {
        const std::size_t nv = skeleton_.vertex_count();
        std::vector<VertexId> ident(nv);
        std::iota(ident.begin(), ident.end(), VertexId{0});
        std::size_t classes = nv;
        for (const auto& [a, b] : identified_) {
            if (unite(ident, a, b)) {
                --classes;
            }
        }
        std::vector<VertexId> comp = ident;
        std::size_t components = classes;
        for (const Edge& e : skeleton_.edges()) {
            if (unite(comp, e.parent, e.child)) {
                --components;
            }
        }
        return skeleton_.edge_count() + components - classes;
    }

    /// Number of connected components of the quotient.
    [[nodiscard]] std::size_t component_count() const {
        const std::size_t nv = skeleton_.vertex_count();
        std::vector<VertexId> comp(nv);
        std::iota(comp.begin(), comp.end(), VertexId{0});
        std::size_t components = nv;
        for (const auto& [a, b] : identified_) {
            if (unite(comp, a, b)) {
                --components;
            }
        }
        for (const Edge& e : skeleton_.edges()) {
            if (unite(comp, e.parent, e.child)) {
                --components;
            }
        }
        return components;
    }

    [[nodiscard]] GluedSpace rescaled(double factor) const { return GluedSpace(skeleton_.rescaled(factor), identified_); }

private:
    static VertexId find(std::vector<VertexId>& parent, VertexId v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    static bool unite(std::vector<VertexId>& parent, VertexId a, VertexId b) {
        a = find(parent, a);
        b = find(parent, b);
        if (a == b) {
            return false;
        }
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }

    void add_portal(VertexId v) {
        if (std::find(portals_.begin(), portals_.end(), v) == portals_.end()) {
            portals_.push_back(v);
            portal_location_.push_back(skeleton_.location_of(v));
        }
    }
    [[nodiscard]] std::size_t portal_index(VertexId v) const {
        return static_cast<std::size_t>(std::find(portals_.begin(), portals_.end(), v) - portals_.begin());
    }

    MetricTree skeleton_;
    std::vector<std::pair<VertexId, VertexId>> identified_;
    std::vector<VertexId> portals_;
    std::vector<PointLocation> portal_location_;
    std::vector<double> portal_dist_;
};

using PointPair = std::pair<PointLocation, PointLocation>;

struct GluedPoints {
    GluedSpace space;
    std::vector<VertexId> points; ///< vertices standing for the extra points, in input order
};

/// Identifies each pair of points of `t`, and also turns every point of `extra` into a
/// vertex. Interior points are split off largest offset first on each edge, so the original
/// locations stay valid while splitting.
inline GluedPoints glue_with_points(const MetricTree& t, std::span<const PointPair> pairs,
                                    std::span<const PointLocation> extra) {
    MetricTree skeleton = t;
    struct Pending {
        PointLocation where;
        std::size_t slot;
    };
    std::vector<Pending> pending;
    pending.reserve(pairs.size() * 2 + extra.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        t.check_location(pairs[i].first);
        t.check_location(pairs[i].second);
        pending.push_back({pairs[i].first, 2 * i});
        pending.push_back({pairs[i].second, 2 * i + 1});
    }
    for (std::size_t i = 0; i < extra.size(); ++i) {
        t.check_location(extra[i]);
        pending.push_back({extra[i], 2 * pairs.size() + i});
    }
    std::sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
        if (a.where.edge != b.where.edge) {
            return a.where.edge < b.where.edge;
        }
        return a.where.offset > b.where.offset;
    });
    std::vector<VertexId> vertex_of(pending.size(), no_id);
    for (std::size_t i = 0; i < pending.size(); ++i) {
        const Pending& p = pending[i];
        if (i > 0 && pending[i - 1].where.edge == p.where.edge && pending[i - 1].where.offset == p.where.offset) {
            vertex_of[p.slot] = vertex_of[pending[i - 1].slot];
            continue;
        }
        vertex_of[p.slot] = skeleton.vertex_at(p.where);
    }
    std::vector<std::pair<VertexId, VertexId>> identified;
    identified.reserve(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        identified.emplace_back(vertex_of[2 * i], vertex_of[2 * i + 1]);
    }
    GluedPoints out;
    out.points.assign(vertex_of.begin() + static_cast<std::ptrdiff_t>(2 * pairs.size()), vertex_of.end());
    out.space = GluedSpace(std::move(skeleton), std::move(identified));
    return out;
}

/// Identifies each pair of points of `t`. Locations in the result refer to the split
/// skeleton.
inline GluedSpace glue(const MetricTree& t, std::span<const PointPair> pairs) {
    return glue_with_points(t, pairs, {}).space;
}

inline double glued_distance(const GluedSpace& s, const PointLocation& p, const PointLocation& q) {
    return s.distance(p, q);
}

/// Pairwise glued distances; symmetric with a zero diagonal.
inline std::vector<std::vector<double>> distance_matrix(const GluedSpace& s, std::span<const PointLocation> points) {
    const std::size_t n = points.size();
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            d[i][j] = d[j][i] = s.distance(points[i], points[j]);
        }
    }
    return d;
}

// Line-based text format:
//   V <id>
//   E <id> <parent> <child> <length>
//   M <name> <edge> <offset>
//   I <edge_a> <offset_a> <edge_b> <offset_b>
// Reals carry 12 significant digits.

inline void write_text(std::ostream& out, const MetricTree& t) {
    for (VertexId v = 0; v < t.vertex_count(); ++v) {
        out << "V " << v << '\n';
    }
    const auto edges = t.edges();
    for (EdgeId e = 0; e < edges.size(); ++e) {
        out << "E " << e << ' ' << edges[e].parent << ' ' << edges[e].child << ' '
            << detail::format_real(edges[e].length) << '\n';
    }
    for (const Mark& m : t.marks()) {
        const PointLocation p = t.location_of(m.vertex);
        out << "M " << m.name << ' ' << p.edge << ' ' << detail::format_real(p.offset) << '\n';
    }
}

inline void write_text(std::ostream& out, const GluedSpace& s) {
    write_text(out, s.skeleton());
    for (const auto& [a, b] : s.identifications()) {
        const PointLocation pa = s.skeleton().location_of(a);
        const PointLocation pb = s.skeleton().location_of(b);
        out << "I " << pa.edge << ' ' << detail::format_real(pa.offset) << ' ' << pb.edge << ' '
            << detail::format_real(pb.offset) << '\n';
    }
}

/// Parses the text format. Identification lines become a GluedSpace over the parsed tree.
inline GluedSpace read_text(std::istream& in) {
    std::size_t vertex_count = 0;
    std::vector<Edge> edges;
    std::vector<std::pair<std::string, PointLocation>> marks;
    std::vector<PointPair> idents;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string tag;
        fields >> tag;
        std::vector<std::string> rest;
        for (std::string f; fields >> f;) {
            rest.push_back(f);
        }
        auto as_index = [](const std::string& s) {
            const long long v = detail::parse_integer(s);
            if (v < 0) {
                throw format_error("negative id");
            }
            return static_cast<std::size_t>(v);
        };
        if (tag == "V" && rest.size() == 1) {
            if (as_index(rest[0]) != vertex_count) {
                throw format_error("vertex ids must be consecutive from 0");
            }
            ++vertex_count;
        } else if (tag == "E" && rest.size() == 4) {
            if (as_index(rest[0]) != edges.size()) {
                throw format_error("edge ids must be consecutive from 0");
            }
            edges.push_back({as_index(rest[1]), as_index(rest[2]), detail::parse_real(rest[3])});
        } else if (tag == "M" && rest.size() == 3) {
            marks.emplace_back(rest[0], PointLocation{as_index(rest[1]), detail::parse_real(rest[2])});
        } else if (tag == "I" && rest.size() == 4) {
            idents.push_back({PointLocation{as_index(rest[0]), detail::parse_real(rest[1])},
                              PointLocation{as_index(rest[2]), detail::parse_real(rest[3])}});
        } else {
            throw format_error("unrecognized line: " + line);
        }
    }
    MetricTree t = MetricTree::from_parts(vertex_count, std::move(edges));
    // Points at an edge end resolve to existing vertices; only interior marks split.
    for (auto& [name, where] : marks) {
        t.check_location(where);
        const Edge& e = t.edge(where.edge);
        const double tol = 1e-9 * e.length;
        if (where.offset <= tol) {
            t.add_mark(name, e.parent);
        } else if (where.offset >= e.length - tol) {
            t.add_mark(name, e.child);
        } else {
            t.add_mark(name, where);
        }
    }
    for (auto& [a, b] : idents) {
        for (PointLocation* p : {&a, &b}) {
            const Edge& e = t.edge(p->edge);
            if (std::abs(p->offset - e.length) <= 1e-9 * e.length) {
                p->offset = e.length;
            }
        }
    }
    return glue(t, idents);
}

} // namespace critgraph
