#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "critgraph/detail/format.hpp"
#include "critgraph/errors.hpp"
#include "critgraph/rng.hpp"

namespace critgraph {

/// Multigraph on vertices 0..n-1; loops and parallel edges allowed. Edges are stored with
/// u <= v, in insertion order.
class Multigraph {
public:
    using EdgeList = std::vector<std::pair<std::size_t, std::size_t>>;

    Multigraph() = default;

    Multigraph(std::size_t n_vertices, EdgeList edges) : n_(n_vertices), edges_(std::move(edges)) {
        for (auto& [u, v] : edges_) {
            if (u >= n_ || v >= n_) {
                throw parameter_error("multigraph edge endpoint out of range");
            }
            if (u > v) {
                std::swap(u, v);
            }
        }
    }

    [[nodiscard]] std::size_t vertex_count() const noexcept { return n_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const EdgeList& edges() const noexcept { return edges_; }
    [[nodiscard]] bool empty() const noexcept { return n_ == 0; }

    [[nodiscard]] std::size_t loop_count() const noexcept {
        return static_cast<std::size_t>(std::count_if(edges_.begin(), edges_.end(), [](const auto& e) { return e.first == e.second; }));
    }

    /// Distinct vertex pairs with their multiplicities, sorted by pair.
    [[nodiscard]] std::map<std::pair<std::size_t, std::size_t>, std::size_t> multiplicities() const {
        std::map<std::pair<std::size_t, std::size_t>, std::size_t> m;
        for (const auto& e : edges_) {
            ++m[e];
        }
        return m;
    }

    /// Degree with loops counted twice.
    [[nodiscard]] std::size_t degree(std::size_t v) const {
        std::size_t d = 0;
        for (const auto& [a, b] : edges_) {
            d += static_cast<std::size_t>(a == v) + static_cast<std::size_t>(b == v);
        }
        return d;
    }

    [[nodiscard]] bool is_three_regular() const {
        if (n_ == 0) {
            return false;
        }
        for (std::size_t v = 0; v < n_; ++v) {
            if (degree(v) != 3) {
                return false;
            }
        }
        return true;
    }

    [[nodiscard]] bool is_connected() const {
        if (n_ == 0) {
            return true;
        }
        std::vector<std::size_t> parent(n_);
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        auto find = [&](std::size_t x) {
            while (parent[x] != x) {
                x = parent[x] = parent[parent[x]];
            }
            return x;
        };
        std::size_t parts = n_;
        for (const auto& [a, b] : edges_) {
            const std::size_t ra = find(a);
            const std::size_t rb = find(b);
            if (ra != rb) {
                parent[ra] = rb;
                --parts;
            }
        }
        return parts == 1;
    }

    /// Lexicographically least sorted edge list over all relabelings; equal codes mean
    /// isomorphic multigraphs. Brute force, so only offered up to 8 vertices.
    [[nodiscard]] std::optional<EdgeList> canonical_code() const {
        if (n_ > 8) {
            return std::nullopt;
        }
        std::vector<std::size_t> perm(n_);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::optional<EdgeList> best;
        EdgeList mapped(edges_.size());
        do {
            for (std::size_t i = 0; i < edges_.size(); ++i) {
                std::size_t a = perm[edges_[i].first];
                std::size_t b = perm[edges_[i].second];
                mapped[i] = a <= b ? std::pair{a, b} : std::pair{b, a};
            }
            std::sort(mapped.begin(), mapped.end());
            if (!best || mapped < *best) {
                best = mapped;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        return best;
    }

    friend bool operator==(const Multigraph& a, const Multigraph& b) {
        if (a.n_ != b.n_) {
            return false;
        }
        EdgeList x = a.edges_;
        EdgeList y = b.edges_;
        std::sort(x.begin(), x.end());
        std::sort(y.begin(), y.end());
        return x == y;
    }

private:
    std::size_t n_ = 0;
    EdgeList edges_;
};

inline std::string code_string(const Multigraph::EdgeList& code) {
    std::string s;
    for (const auto& [a, b] : code) {
        if (!s.empty()) {
            s += ';';
        }
        s += std::to_string(a) + '-' + std::to_string(b);
    }
    return s;
}

/// (2^t prod_e mult(e)!)^{-1}, where t counts loops.
inline double kernel_weight(const Multigraph& g) {
    if (!g.is_three_regular()) {
        throw domain_error("kernel_weight needs a 3-regular multigraph");
    }
    double denom = 1.0;
    for (const auto& [pair, mult] : g.multiplicities()) {
        for (std::size_t i = 2; i <= mult; ++i) {
            denom *= static_cast<double>(i);
        }
        if (pair.first == pair.second) {
            denom *= std::pow(2.0, static_cast<double>(mult));
        }
    }
    return 1.0 / denom;
}

inline std::size_t kernel_vertex_count(long k) {
    if (k < 2) {
        throw parameter_error("kernels exist for surplus k >= 2");
    }
    return static_cast<std::size_t>(2 * (k - 1));
}

/// Uniform perfect matching of three half-edges per vertex on 2(k-1) vertices, redrawn
/// until connected. Edges appear in matching order.
inline Multigraph sample_kernel(RngStream& stream, long k) {
    const std::size_t n = kernel_vertex_count(k);
    const std::size_t half_edges = 3 * n;
    std::vector<std::size_t> slots(half_edges);
    for (;;) {
        std::iota(slots.begin(), slots.end(), std::size_t{0});
        for (std::size_t i = half_edges - 1; i > 0; --i) {
            const std::size_t j = static_cast<std::size_t>(stream.below(i + 1));
            std::swap(slots[i], slots[j]);
        }
        Multigraph::EdgeList edges;
        edges.reserve(half_edges / 2);
        for (std::size_t i = 0; i < half_edges; i += 2) {
            edges.emplace_back(slots[i] / 3, slots[i + 1] / 3);
        }
        Multigraph g(n, std::move(edges));
        if (g.is_connected()) {
            return g;
        }
    }
}

struct KernelClass {
    Multigraph representative;
    double weight = 0.0;        ///< kernel_weight of any member
    double probability = 0.0;   ///< labeled_count * weight, normalized
    std::size_t labeled_count = 0;
    Multigraph::EdgeList code;
};

namespace detail {

inline void enumerate_labeled(std::size_t n, std::vector<std::size_t>& deficit, std::size_t row, std::size_t col,
                              Multigraph::EdgeList& edges, std::vector<Multigraph>& out) {
    if (row == n) {
        out.emplace_back(n, edges);
        return;
    }
    if (col == n) {
        if (deficit[row] == 0) {
            enumerate_labeled(n, deficit, row + 1, row + 1, edges, out);
        }
        return;
    }
    if (col == row) {
        // loops: each takes two units of degree
        for (std::size_t loops = 0; 2 * loops <= deficit[row]; ++loops) {
            deficit[row] -= 2 * loops;
            edges.insert(edges.end(), loops, {row, row});
            enumerate_labeled(n, deficit, row, col + 1, edges, out);
            edges.resize(edges.size() - loops);
            deficit[row] += 2 * loops;
        }
        return;
    }
    const std::size_t cap = std::min(deficit[row], deficit[col]);
    for (std::size_t mult = 0; mult <= cap; ++mult) {
        deficit[row] -= mult;
        deficit[col] -= mult;
        edges.insert(edges.end(), mult, {row, col});
        enumerate_labeled(n, deficit, row, col + 1, edges, out);
        edges.resize(edges.size() - mult);
        deficit[row] += mult;
        deficit[col] += mult;
    }
}

/// Every 3-regular multigraph on labeled vertices 0..n-1, connected or not.
inline std::vector<Multigraph> all_labeled_cubic(std::size_t n) {
    std::vector<std::size_t> deficit(n, 3);
    Multigraph::EdgeList edges;
    std::vector<Multigraph> out;
    enumerate_labeled(n, deficit, 0, 0, edges, out);
    return out;
}

inline std::vector<KernelClass> build_kernel_classes(long k) {
    const std::size_t n = kernel_vertex_count(k);
    std::map<Multigraph::EdgeList, KernelClass> by_code;
    for (const Multigraph& g : all_labeled_cubic(n)) {
        if (!g.is_connected()) {
            continue;
        }
        const auto code = *g.canonical_code();
        auto [it, fresh] = by_code.try_emplace(code);
        if (fresh) {
            it->second.representative = Multigraph(n, code);
            it->second.weight = kernel_weight(g);
            it->second.code = code;
        }
        ++it->second.labeled_count;
    }
    std::vector<KernelClass> classes;
    double total = 0.0;
    for (auto& [code, cls] : by_code) {
        total += static_cast<double>(cls.labeled_count) * cls.weight;
        classes.push_back(std::move(cls));
    }
    for (KernelClass& c : classes) {
        c.probability = static_cast<double>(c.labeled_count) * c.weight / total;
    }
    std::stable_sort(classes.begin(), classes.end(), [](const KernelClass& a, const KernelClass& b) {
        const std::size_t la = a.representative.loop_count();
        const std::size_t lb = b.representative.loop_count();
        return la != lb ? la < lb : a.code < b.code;
    });
    return classes;
}

} // namespace detail

/// Isomorphism classes of connected 3-regular multigraphs on 2(k-1) vertices, with the law
/// induced by uniform half-edge pairing: a class gets (number of labelings) * kernel_weight.
/// Ordered by loop count, then canonical code. Results are cached per k.
inline const std::vector<KernelClass>& enumerate_kernels(long k) {
    if (k < 2 || k > 4) {
        throw unsupported_error("kernel enumeration is available for k in {2, 3, 4}");
    }
    static std::once_flag flags[3];
    static std::vector<KernelClass> cache[3];
    const auto slot = static_cast<std::size_t>(k - 2);
    std::call_once(flags[slot], [&] { cache[slot] = detail::build_kernel_classes(k); });
    return cache[slot];
}

/// Position of `g` in enumerate_kernels(k) for its k, or nullopt when it is not a connected
/// cubic kernel with 2..6 vertices.
inline std::optional<std::size_t> kernel_class_id(const Multigraph& g) {
    const std::size_t n = g.vertex_count();
    if (n < 2 || n > 6 || n % 2 != 0 || !g.is_three_regular() || !g.is_connected()) {
        return std::nullopt;
    }
    const long k = static_cast<long>(n / 2 + 1);
    const auto code = *g.canonical_code();
    const auto& classes = enumerate_kernels(k);
    for (std::size_t i = 0; i < classes.size(); ++i) {
        if (classes[i].code == code) {
            return i;
        }
    }
    return std::nullopt;
}

/// Header `k <k> vertices <n>`, then one `u v mult` line per distinct pair (loops as `u u`).
inline void write_kernel(std::ostream& out, const Multigraph& g) {
    const long k = static_cast<long>(g.vertex_count() / 2 + 1);
    out << "k " << k << " vertices " << g.vertex_count() << '\n';
    for (const auto& [pair, mult] : g.multiplicities()) {
        out << pair.first << ' ' << pair.second << ' ' << mult << '\n';
    }
}

inline Multigraph read_kernel(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw format_error("missing kernel header");
    }
    std::istringstream header(line);
    std::string k_tag;
    std::string v_tag;
    std::string k_text;
    std::string n_text;
    header >> k_tag >> k_text >> v_tag >> n_text;
    if (k_tag != "k" || v_tag != "vertices") {
        throw format_error("bad kernel header: " + line);
    }
    const auto n = static_cast<std::size_t>(detail::parse_integer(n_text));
    Multigraph::EdgeList edges;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string a;
        std::string b;
        std::string m;
        if (!(fields >> a >> b >> m)) {
            throw format_error("bad kernel edge line: " + line);
        }
        const long long mult = detail::parse_integer(m);
        if (mult < 1) {
            throw format_error("multiplicity must be positive");
        }
        const auto u = static_cast<std::size_t>(detail::parse_integer(a));
        const auto v = static_cast<std::size_t>(detail::parse_integer(b));
        if (u >= n || v >= n) {
            throw format_error("kernel edge endpoint out of range: " + line);
        }
        edges.insert(edges.end(), static_cast<std::size_t>(mult), {u, v});
    }
    return Multigraph(n, std::move(edges));
}

} // namespace critgraph
