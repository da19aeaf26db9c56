#pragma once

#include <cstddef>
#include <vector>

#include "critgraph/rng.hpp"

namespace testing_support {

template <class F>
std::vector<double> draws(critgraph::RngStream& s, std::size_t n, F f) {
    std::vector<double> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(f(s));
    }
    return out;
}

inline double fraction(const std::vector<double>& xs, double threshold) {
    std::size_t hits = 0;
    for (const double x : xs) {
        hits += x >= threshold ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(xs.size());
}

} // namespace testing_support
