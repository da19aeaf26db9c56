#pragma once

#include <bit>
#include <cstddef>
#include <vector>

namespace critgraph::detail {

/// Growable Fenwick tree over non-negative weights.
class Fenwick {
public:
    [[nodiscard]] std::size_t size() const noexcept { return n_; }

    void push_back(double value) {
        ++n_;
        tree_.resize(n_ + 1, 0.0);
        const std::size_t i = n_;
        const std::size_t low = i & (~i + 1);
        tree_[i] = value + prefix(i - 1) - prefix(i - low);
    }

    void add(std::size_t index, double delta) {
        for (std::size_t i = index + 1; i <= n_; i += i & (~i + 1)) {
            tree_[i] += delta;
        }
    }

    /// Sum of the first `count` weights.
    [[nodiscard]] double prefix(std::size_t count) const {
        double s = 0.0;
        for (std::size_t i = count; i > 0; i -= i & (~i + 1)) {
            s += tree_[i];
        }
        return s;
    }

    struct Hit {
        std::size_t index;
        double before; ///< sum of weights strictly before `index`
    };

    /// Smallest index whose inclusive prefix sum reaches `target`; ties resolve to the
    /// earlier index. Targets beyond the total land on the last index.
    [[nodiscard]] Hit find(double target) const {
        std::size_t pos = 0;
        double remaining = target;
        for (std::size_t step = std::bit_floor(n_); step > 0; step >>= 1) {
            const std::size_t next = pos + step;
            if (next <= n_ && tree_[next] < remaining) {
                pos = next;
                remaining -= tree_[next];
            }
        }
        if (pos >= n_) {
            pos = n_ - 1;
            return {pos, prefix(pos)};
        }
        return {pos, target - remaining};
    }

private:
    std::size_t n_ = 0;
    std::vector<double> tree_{0.0};
};

} // namespace critgraph::detail
