#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critgraph/distributions.hpp"
#include "critgraph/errors.hpp"
#include "critgraph/kernel.hpp"
#include "critgraph/metric_tree.hpp"
#include "critgraph/process.hpp"
#include "critgraph/rng.hpp"

namespace critgraph {

/// Lengths of the core of a surplus-k component of mass 1: the cycle for k = 1, the
/// 3k - 3 kernel-edge paths for k >= 2.
struct CoreLengths {
    long k = 0;
    std::vector<double> lengths;
    double total = 0.0;
};

inline std::size_t core_edge_count(long k) { return k == 1 ? 1 : static_cast<std::size_t>(3 * k - 3); }

/// k = 1: C with C^2 ~ Gamma(1/2, 1/2). k >= 2: total sqrt(G), G ~ Gamma((m + 1)/2, 1/2), split
/// by independent Dirichlet(1, ..., 1) proportions.
inline CoreLengths sample_core_lengths(RngStream& stream, long k) {
    if (k < 1) {
        throw domain_error("a component with surplus 0 has no core");
    }
    CoreLengths core;
    core.k = k;
    if (k == 1) {
        const double c = std::sqrt(sample_gamma(stream, 0.5, 0.5));
        core.lengths = {c};
        core.total = c;
        return core;
    }
    const std::size_t m = core_edge_count(k);
    const double scale = std::sqrt(sample_gamma(stream, (static_cast<double>(m) + 1.0) / 2.0, 0.5));
    const SimplexVector y = sample_dirichlet(stream, m, 1.0);
    core.lengths.reserve(m);
    for (const double p : y) {
        core.lengths.push_back(scale * p);
        core.total += scale * p;
    }
    return core;
}

struct RootedPrecore {
    CoreLengths core;
    double stem = 0.0;            ///< segment nearest the root
    std::size_t attach_edge = 0;  ///< core edge receiving the stem
    double attach_offset = 0.0;
};

/// k = 1: (cycle, stem) = sqrt(G) (U, 1 - U), G ~ Gamma(3/2, 1/2); the stem meets the cycle at
/// the identified point. k >= 2: stem is the next Poisson gap after the core total, attached
/// at a uniform point of the core.
inline RootedPrecore sample_rooted_precore(RngStream& stream, long k) {
    if (k < 1) {
        throw domain_error("a component with surplus 0 has no core");
    }
    RootedPrecore out;
    if (k == 1) {
        const double scale = std::sqrt(sample_gamma(stream, 1.5, 0.5));
        const double u = stream.uniform();
        out.core.k = 1;
        out.core.lengths = {scale * u};
        out.core.total = scale * u;
        out.stem = scale * (1.0 - u);
        return out;
    }
    out.core = sample_core_lengths(stream, k);
    out.stem = poisson_gap(stream, out.core.total);
    out.attach_edge = size_biased_index(stream, out.core.lengths);
    out.attach_offset = stream.uniform() * out.core.lengths[out.attach_edge];
    return out;
}

struct ComponentProvenance {
    int procedure = 0;
    std::size_t segments = 0;           ///< stick-breaking segments added (per tree for procedure 1)
    std::size_t vertex_attachments = 0; ///< uniform points that landed on an existing vertex
    std::size_t kernel_vertex_hits = 0; ///< ... of which on a kernel vertex or the cycle point
};

/// A sampled limit component of mass 1 (or rescaled afterwards).
///
/// kernel_paths[i] holds the two skeleton vertices joined by kernel edge i (or the cycle for
/// k = 1); their tree distance in the skeleton is that path's length.
struct LimitComponent {
    long k = 0;
    std::optional<Multigraph> kernel;
    GluedSpace space;
    std::optional<SimplexVector> edge_tree_masses;
    std::vector<std::pair<VertexId, VertexId>> kernel_paths;
    ComponentProvenance provenance;
};

inline std::vector<double> kernel_path_lengths(const LimitComponent& c) {
    std::vector<double> out;
    out.reserve(c.kernel_paths.size());
    for (const auto& [a, b] : c.kernel_paths) {
        out.push_back(c.space.skeleton().vertex_distance(a, b));
    }
    return out;
}

inline double cycle_length(const LimitComponent& c) {
    if (c.k != 1) {
        throw domain_error("cycle length is defined for surplus 1");
    }
    return kernel_path_lengths(c).front();
}

/// Brownian scaling: mass sigma multiplies every distance by sqrt(sigma).
inline LimitComponent rescale_to_mass(const LimitComponent& c, double sigma) {
    if (!(sigma > 0.0)) {
        throw parameter_error("mass must be positive");
    }
    LimitComponent out = c;
    out.space = c.space.rescaled(std::sqrt(sigma));
    return out;
}

namespace detail {

/// Identifies consecutive members of each group.
inline void chain(const std::vector<std::vector<VertexId>>& groups, std::vector<std::pair<VertexId, VertexId>>& out) {
    for (const auto& g : groups) {
        for (std::size_t i = 1; i < g.size(); ++i) {
            out.emplace_back(g[i - 1], g[i]);
        }
    }
}

} // namespace detail

/// Core skeleton for stick-breaking from a core: for k >= 2 one segment per kernel edge (in
/// kernel edge order, each its own skeleton component), endpoints glued at kernel vertices.
/// For k = 1 the lollipop: stem from the root, then the cycle, whose ends are identified.
/// Returns the space and the core path endpoints.
struct CoreSkeleton {
    GluedSpace space;
    std::vector<std::pair<VertexId, VertexId>> paths;
    std::vector<VertexId> junctions; ///< skeleton vertices that sit on kernel vertices
};

inline CoreSkeleton build_core_skeleton(const Multigraph& kernel, const CoreLengths& core) {
    if (core.lengths.size() != kernel.edge_count()) {
        throw parameter_error("core lengths must match the kernel edges");
    }
    MetricTree t;
    CoreSkeleton out;
    std::vector<std::vector<VertexId>> at_vertex(kernel.vertex_count());
    for (std::size_t i = 0; i < kernel.edge_count(); ++i) {
        const VertexId r = t.add_root();
        const VertexId l = t.add_edge(r, core.lengths[i]);
        at_vertex[kernel.edges()[i].first].push_back(r);
        at_vertex[kernel.edges()[i].second].push_back(l);
        out.paths.emplace_back(r, l);
        out.junctions.push_back(r);
        out.junctions.push_back(l);
    }
    std::vector<std::pair<VertexId, VertexId>> ids;
    detail::chain(at_vertex, ids);
    out.space = GluedSpace(std::move(t), std::move(ids));
    return out;
}

inline CoreSkeleton build_lollipop(double cycle, double stem) {
    MetricTree t;
    const VertexId root = t.add_root();
    const VertexId a = t.add_edge(root, stem);
    const VertexId b = t.add_edge(a, cycle);
    t.add_mark("root", root);
    CoreSkeleton out;
    out.paths = {{a, b}};
    out.junctions = {a, b};
    out.space = GluedSpace(std::move(t), {{a, b}});
    return out;
}

/// Procedure 2: a random core, then stick-breaking continued from its total length.
/// Colors, gaps and positions are drawn from separate child streams of `stream`.
inline LimitComponent sample_component_p2(RngStream& stream, long k, std::size_t n_segments) {
    if (k < 0) {
        throw parameter_error("surplus must be non-negative");
    }
    LimitComponent out;
    out.k = k;
    out.provenance.procedure = 2;
    out.provenance.segments = n_segments;
    RngStream growth = stream.child("growth", stream.next_u64());
    RngStream place = stream.child("place", stream.next_u64());
    if (k == 0) {
        MetricTree t = stick_break(growth, place, MetricTree::single_point(), n_segments);
        out.space = GluedSpace(std::move(t), {});
        return out;
    }
    CoreSkeleton core;
    if (k == 1) {
        const double scale = std::sqrt(sample_gamma(stream, 1.5, 0.5));
        const double u = stream.uniform();
        core = build_lollipop(scale * u, scale * (1.0 - u));
    } else {
        Multigraph kernel = sample_kernel(stream, k);
        core = build_core_skeleton(kernel, sample_core_lengths(stream, k));
        out.kernel = std::move(kernel);
    }
    ComponentProvenance& prov = out.provenance;
    const std::vector<VertexId>& junctions = core.junctions;
    out.space = stick_break(growth, place, core.space, n_segments, [&](const GrowthEvent& ev) {
        if (ev.at_existing_vertex) {
            ++prov.vertex_attachments;
            if (std::find(junctions.begin(), junctions.end(), ev.anchor) != junctions.end()) {
                ++prov.kernel_vertex_hits;
            }
        }
    });
    out.kernel_paths = std::move(core.paths);
    return out;
}

/// Procedure 1: Dirichlet(1/2, ...) masses, independent stick-break trees rescaled by the
/// square roots of their masses, glued along the kernel edges. Each tree runs from its root
/// to its first leaf.
inline LimitComponent sample_component_p1(RngStream& stream, long k, std::size_t n_segments_per_tree) {
    if (k < 0) {
        throw parameter_error("surplus must be non-negative");
    }
    if (n_segments_per_tree < 1) {
        throw parameter_error("procedure 1 needs at least one segment per tree");
    }
    LimitComponent out;
    out.k = k;
    out.provenance.procedure = 1;
    out.provenance.segments = n_segments_per_tree;
    auto grow_tree = [&](double mass) {
        MetricTree t = stick_break(stream, n_segments_per_tree);
        return mass == 1.0 ? t : t.rescaled(std::sqrt(mass));
    };
    if (k == 0) {
        out.space = GluedSpace(grow_tree(1.0), {});
        return out;
    }
    MetricTree skeleton;
    std::vector<std::pair<VertexId, VertexId>> ids;
    if (k == 1) {
        const SimplexVector x = sample_dirichlet(stream, 2, 0.5);
        const MetricTree cycle_tree = grow_tree(x[0]);
        const MetricTree hanging = grow_tree(x[1]);
        const auto first = skeleton.append(cycle_tree, "t0.");
        const auto second = skeleton.append(hanging, "t1.");
        const VertexId root1 = first.vertex + cycle_tree.roots()[0];
        const VertexId leaf1 = first.vertex + cycle_tree.mark("leaf1");
        const VertexId root2 = second.vertex + hanging.roots()[0];
        ids = {{root1, leaf1}, {root1, root2}};
        out.kernel_paths = {{root1, leaf1}};
        out.edge_tree_masses = x;
    } else {
        Multigraph kernel = sample_kernel(stream, k);
        const std::size_t m = kernel.edge_count();
        const SimplexVector x = sample_dirichlet(stream, m, 0.5);
        std::vector<std::vector<VertexId>> at_vertex(kernel.vertex_count());
        for (std::size_t i = 0; i < m; ++i) {
            const MetricTree tree = grow_tree(x[i]);
            const auto off = skeleton.append(tree, "t" + std::to_string(i) + ".");
            const VertexId r = off.vertex + tree.roots()[0];
            const VertexId l = off.vertex + tree.mark("leaf1");
            at_vertex[kernel.edges()[i].first].push_back(r);
            at_vertex[kernel.edges()[i].second].push_back(l);
            out.kernel_paths.emplace_back(r, l);
        }
        detail::chain(at_vertex, ids);
        out.kernel = std::move(kernel);
        out.edge_tree_masses = x;
    }
    out.space = GluedSpace(std::move(skeleton), std::move(ids));
    return out;
}

/// Shape of a reduced tree: node i hangs below parent[i] (or below the root when
/// parent[i] < 0) by an edge of length lengths[i]. The root has a single child and every
/// other internal node exactly two.
struct TreeShape {
    std::vector<long> parent;
    std::vector<double> lengths;
};

namespace detail {

inline std::vector<std::size_t> validate_shape(const TreeShape& s) {
    const std::size_t n = s.parent.size();
    if (n == 0 || s.lengths.size() != n) {
        throw domain_error("tree shape needs one length per node");
    }
    std::vector<std::size_t> children(n, 0);
    std::size_t at_root = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (s.parent[i] < 0) {
            ++at_root;
        } else if (static_cast<std::size_t>(s.parent[i]) >= n || static_cast<std::size_t>(s.parent[i]) == i) {
            throw domain_error("tree shape parent out of range");
        } else {
            ++children[static_cast<std::size_t>(s.parent[i])];
        }
        if (!(s.lengths[i] >= 0.0) || !std::isfinite(s.lengths[i])) {
            throw domain_error("tree shape lengths must be non-negative");
        }
    }
    if (at_root != 1) {
        throw domain_error("the root of a tree shape has exactly one child");
    }
    std::vector<std::size_t> leaves;
    for (std::size_t i = 0; i < n; ++i) {
        if (children[i] == 0) {
            leaves.push_back(i);
        } else if (children[i] != 2) {
            throw domain_error("tree shape is not binary");
        }
    }
    // every node must reach the root within n steps
    for (std::size_t i = 0; i < n; ++i) {
        long v = static_cast<long>(i);
        std::size_t steps = 0;
        while (v >= 0) {
            v = s.parent[static_cast<std::size_t>(v)];
            if (++steps > n) {
                throw domain_error("tree shape contains a cycle");
            }
        }
    }
    if (n != 2 * leaves.size() - 1) {
        throw domain_error("tree shape has the wrong node count for its leaves");
    }
    return leaves;
}

} // namespace detail

/// Unnormalized joint density of shape and lengths of the reduced tree spanned by the
/// root and k height-biased leaves: prod_leaves(height) * L * exp(-L^2 / 2), L = total length.
inline double eval_tilted_fdd_density(const TreeShape& shape) {
    const auto leaves = detail::validate_shape(shape);
    double total = 0.0;
    for (const double l : shape.lengths) {
        total += l;
    }
    double value = total * std::exp(-0.5 * total * total);
    for (const std::size_t leaf : leaves) {
        double height = 0.0;
        for (long v = static_cast<long>(leaf); v >= 0; v = shape.parent[static_cast<std::size_t>(v)]) {
            height += shape.lengths[static_cast<std::size_t>(v)];
        }
        value *= height;
    }
    return value;
}

/// Unnormalized density of the 3k - 1 pre-core lengths: S exp(-S^2 / 2), S their sum.
inline double eval_precore_density(std::span<const double> lengths) {
    if (lengths.size() < 2 || (lengths.size() + 1) % 3 != 0) {
        throw domain_error("pre-core has 3k - 1 segments for some k >= 1");
    }
    double s = 0.0;
    for (const double m : lengths) {
        if (!(m > 0.0) || !std::isfinite(m)) {
            throw domain_error("pre-core lengths must be positive");
        }
        s += m;
    }
    return s * std::exp(-0.5 * s * s);
}

} // namespace critgraph
