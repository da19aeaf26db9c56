#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "critgraph/distributions.hpp"
#include "critgraph/errors.hpp"
#include "critgraph/limit_sampler.hpp"
#include "critgraph/process.hpp"
#include "critgraph/rng.hpp"

namespace critgraph {

/// Continuous urn with m colors: lengths L_i, odd ball counts N_i, total C = sum L_i.
struct UrnState {
    std::size_t step = 0;
    std::vector<double> lengths;
    std::vector<std::uint64_t> counts;
    double total = 0.0;

    [[nodiscard]] std::size_t colors() const noexcept { return lengths.size(); }
    [[nodiscard]] double proportion(std::size_t i) const { return lengths.at(i) / total; }
};

/// Starts from the core of a surplus k >= 2 component, one ball per color.
inline UrnState urn_init(const CoreLengths& core) {
    if (core.k < 2 || core.lengths.size() < 3) {
        throw domain_error("the urn starts from a core with at least three edges (k >= 2)");
    }
    UrnState s;
    s.lengths = core.lengths;
    s.counts.assign(core.lengths.size(), 1);
    // summed in color order, as stick_break does, so a coupled run agrees bit for bit
    for (const double l : s.lengths) {
        s.total += l;
    }
    return s;
}

struct UrnDraw {
    std::size_t color;
    double amount;
};

/// One step in place: color size-biased by length, amount the next Poisson gap after C.
inline UrnDraw urn_advance(RngStream& stream, UrnState& s) {
    const std::size_t i = size_biased_index(stream, s.lengths);
    const double a = poisson_gap(stream, s.total);
    s.lengths[i] += a;
    s.counts[i] += 2;
    s.total += a;
    ++s.step;
    return {i, a};
}

inline UrnState urn_step(RngStream& stream, UrnState s) {
    urn_advance(stream, s);
    return s;
}

/// States after every `stride` steps (and the final one); the start state is included.
inline std::vector<UrnState> urn_run(RngStream& stream, UrnState s, std::size_t n_steps, std::size_t stride = 1) {
    if (stride == 0) {
        throw parameter_error("checkpoint stride must be positive");
    }
    std::vector<UrnState> out{s};
    for (std::size_t i = 1; i <= n_steps; ++i) {
        urn_advance(stream, s);
        if (i % stride == 0 || i == n_steps) {
            out.push_back(s);
        }
    }
    return out;
}

/// Discrete Polya urn: one ball of each of m colors; each step draws a ball uniformly and
/// returns it with two more of its color. Returns counts at every `stride` steps (start included).
inline std::vector<std::vector<std::uint64_t>> polya_run(RngStream& stream, std::size_t m, std::size_t n_steps,
                                                         std::size_t stride = 1) {
    if (m < 2) {
        throw parameter_error("the Polya urn needs at least two colors");
    }
    if (stride == 0) {
        throw parameter_error("checkpoint stride must be positive");
    }
    std::vector<std::uint64_t> counts(m, 1);
    std::uint64_t balls = m;
    std::vector<std::vector<std::uint64_t>> out{counts};
    for (std::size_t n = 1; n <= n_steps; ++n) {
        std::uint64_t pick = stream.below(balls);
        std::size_t color = 0;
        while (pick >= counts[color]) {
            pick -= counts[color];
            ++color;
        }
        counts[color] += 2;
        balls += 2;
        if (n % stride == 0 || n == n_steps) {
            out.push_back(counts);
        }
    }
    return out;
}

} // namespace critgraph
