#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "critgraph/detail/fenwick.hpp"
#include "critgraph/distributions.hpp"
#include "critgraph/errors.hpp"
#include "critgraph/metric_tree.hpp"
#include "critgraph/rng.hpp"

namespace critgraph {

/// Gap to the next point of the rate-t Poisson process given the last point is at c, by
/// inversion of P(a > x) = exp(-((x + c)^2 - c^2) / 2). Written as
/// -2 ln u / (sqrt(c^2 - 2 ln u) + c) to avoid cancellation for large c.
inline double poisson_gap_from_uniform(double c, double u) {
    if (!(c >= 0.0)) {
        throw parameter_error("poisson_gap: last point must be non-negative");
    }
    if (!(u > 0.0) || u > 1.0) {
        throw parameter_error("poisson_gap: uniform must lie in (0, 1]");
    }
    const double e = -2.0 * std::log(u);
    if (e <= 0.0) {
        return 0.0;
    }
    return e / (std::sqrt(c * c + e) + c);
}

inline double poisson_gap(RngStream& stream, double last_point) {
    return poisson_gap_from_uniform(last_point, stream.uniform());
}

inline double poisson_first_arrival_from_uniform(double u) { return poisson_gap_from_uniform(0.0, u); }

/// First point of the process: Rayleigh distributed.
inline double poisson_first_arrival(RngStream& stream) { return poisson_gap(stream, 0.0); }

struct ArrivalSchedule {
    double start = 0.0;
    std::vector<double> arrival_times;
    std::vector<double> gaps;
};

/// The next `count` points after `start`.
inline ArrivalSchedule poisson_arrivals(RngStream& stream, std::size_t count, double start = 0.0) {
    ArrivalSchedule s;
    s.start = start;
    s.arrival_times.reserve(count);
    s.gaps.reserve(count);
    double t = start;
    for (std::size_t i = 0; i < count; ++i) {
        const double a = poisson_gap(stream, t);
        t += a;
        s.gaps.push_back(a);
        s.arrival_times.push_back(t);
    }
    return s;
}

/// One attachment performed by stick_break.
struct GrowthEvent {
    std::size_t color;     ///< component of the structure that received the segment
    double amount;         ///< segment length
    VertexId anchor;       ///< where the segment was attached
    VertexId leaf;         ///< its free end
    bool at_existing_vertex; ///< the uniform point landed exactly on a vertex
};

using GrowthObserver = std::function<void(const GrowthEvent&)>;

namespace detail {

/// Incremental stick-breaking over a forest. Each component is a color; its length is the
/// total length of its edges. Drawing the color size-biased and then a uniform point inside
/// it is the same as drawing a uniform point of the whole structure, and it makes the
/// sequence of (color, amount) pairs exactly the continuous urn.
class StickBreaker {
public:
    explicit StickBreaker(MetricTree tree) : tree_(std::move(tree)) {
        const std::size_t comps = tree_.component_count();
        lengths_.assign(comps, 0.0);
        index_.resize(comps);
        members_.resize(comps);
        for (EdgeId e = 0; e < tree_.edge_count(); ++e) {
            track(e);
            lengths_[tree_.component_of(tree_.edge(e).parent)] += tree_.edge(e).length;
        }
        for (const double l : lengths_) {
            total_ += l;
        }
    }

    [[nodiscard]] double total() const noexcept { return total_; }
    [[nodiscard]] const MetricTree& tree() const noexcept { return tree_; }
    MetricTree release() { return std::move(tree_); }

    void grow(RngStream& growth, RngStream& place, std::size_t leaf_number, const GrowthObserver& observer) {
        std::size_t color = 0;
        if (lengths_.size() > 1) {
            color = size_biased_index(growth, lengths_);
        }
        const double amount = poisson_gap(growth, total_);
        VertexId anchor = 0;
        bool on_vertex = false;
        if (lengths_[color] > 0.0) {
            const double target = place.uniform() * lengths_[color];
            const auto hit = index_[color].find(target);
            const EdgeId e = members_[color][hit.index];
            const double len = tree_.edge(e).length;
            const double offset = target - hit.before;
            if (offset <= 0.0) {
                anchor = tree_.edge(e).parent;
                on_vertex = true;
            } else if (offset >= len) {
                anchor = tree_.edge(e).child;
                on_vertex = true;
            } else {
                anchor = tree_.split_edge(e, offset);
                index_[color].add(hit.index, offset - len);
                track(tree_.edge_count() - 1);
            }
        } else {
            // a bare point: the first segment grows from it
            anchor = tree_.roots()[color];
        }
        const VertexId leaf = tree_.add_edge(anchor, amount);
        track(tree_.edge_count() - 1);
        lengths_[color] += amount;
        total_ += amount;
        tree_.add_mark("leaf" + std::to_string(leaf_number), leaf);
        if (observer) {
            observer(GrowthEvent{color, amount, anchor, leaf, on_vertex});
        }
    }

private:
    void track(EdgeId e) {
        const std::size_t c = tree_.component_of(tree_.edge(e).parent);
        index_[c].push_back(tree_.edge(e).length);
        members_[c].push_back(e);
    }

    MetricTree tree_;
    std::vector<double> lengths_;
    std::vector<Fenwick> index_;
    std::vector<std::vector<EdgeId>> members_;
    double total_ = 0.0;
};

} // namespace detail

/// Adds `n_segments` segments to `initial`. Segment lengths are successive gaps of the
/// rate-t process started from the current total length; each is attached at a uniform
/// point (by length) of the structure built so far. New free ends are marked leaf1, leaf2, ...
///
/// `growth` supplies color picks and gaps, `place` supplies positions within a color.
inline MetricTree stick_break(RngStream& growth, RngStream& place, MetricTree initial, std::size_t n_segments,
                              const GrowthObserver& observer = {}) {
    if (initial.vertex_count() == 0) {
        initial = MetricTree::single_point();
    }
    if (initial.total_length() <= 0.0 && initial.component_count() != 1) {
        throw parameter_error("stick_break: a zero-length start must be a single point");
    }
    detail::StickBreaker breaker(std::move(initial));
    for (std::size_t i = 1; i <= n_segments; ++i) {
        breaker.grow(growth, place, i, observer);
    }
    return breaker.release();
}

/// Continuation on a glued structure: identifications refer to vertices, which splitting
/// never renumbers, so they carry over unchanged.
inline GluedSpace stick_break(RngStream& growth, RngStream& place, const GluedSpace& initial, std::size_t n_segments,
                              const GrowthObserver& observer = {}) {
    std::vector<std::pair<VertexId, VertexId>> ids(initial.identifications().begin(),
                                                    initial.identifications().end());
    MetricTree grown = stick_break(growth, place, initial.skeleton(), n_segments, observer);
    return GluedSpace(std::move(grown), std::move(ids));
}

/// Single-stream form; positions come from a child stream forked off `stream`.
inline MetricTree stick_break(RngStream& stream, MetricTree initial, std::size_t n_segments) {
    RngStream place = stream.child("place", stream.next_u64());
    return stick_break(stream, place, std::move(initial), n_segments);
}

/// Fresh build from a single point: 2n - 1 edges and n leaves.
inline MetricTree stick_break(RngStream& stream, std::size_t n_segments) {
    return stick_break(stream, MetricTree::single_point(), n_segments);
}

} // namespace critgraph
