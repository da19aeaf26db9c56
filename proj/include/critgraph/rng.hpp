#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace critgraph {

namespace detail {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Odd Weyl increment with enough bit transitions (SplittableRandom's mixGamma).
constexpr std::uint64_t mix_gamma(std::uint64_t z) noexcept {
    z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
    z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
    z = (z ^ (z >> 33)) | 1ULL;
    const int transitions = __builtin_popcountll(z ^ (z >> 1));
    return transitions < 24 ? z ^ 0xaaaaaaaaaaaaaaaaULL : z;
}

constexpr std::uint64_t fnv1a(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

/// Seedable, splittable, counter-based source of uniforms.
///
/// The n-th output of a stream is a pure function of (master_seed, stream_id, n), so two
/// streams built from the same pair replay bit-identically on every platform. Children are
/// derived from stable string labels (plus an optional index), never from consumed state.
/// Satisfies UniformRandomBitGenerator.
class RngStream {
public:
    using result_type = std::uint64_t;

    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0) noexcept
        : master_seed_(master_seed), stream_id_(stream_id) {
        const std::uint64_t key = detail::mix64(master_seed ^ detail::mix64(stream_id + 0x9e3779b97f4a7c15ULL));
        seed_ = detail::mix64(key);
        gamma_ = detail::mix_gamma(key ^ 0x5851f42d4c957f2dULL);
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept { return next_u64(); }

    std::uint64_t next_u64() noexcept {
        ++counter_;
        return detail::mix64(seed_ + counter_ * gamma_);
    }

    /// Uniform on the open interval (0, 1); never returns 0 or 1.
    double uniform() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform on (lo, hi).
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n) by rejection (no modulo bias). n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept {
        const std::uint64_t limit = max() - max() % n;
        std::uint64_t x = next_u64();
        while (x >= limit) {
            x = next_u64();
        }
        return x % n;
    }

    /// Child stream with id = hash(stream_id, label, index); independent of how much of
    /// this stream has been consumed.
    [[nodiscard]] RngStream child(std::string_view label, std::uint64_t index = 0) const noexcept {
        const std::uint64_t h = detail::mix64(detail::fnv1a(label) ^ detail::mix64(index + 0x632be59bd9b4e019ULL));
        return RngStream(master_seed_, detail::mix64(stream_id_ * 0x9e3779b97f4a7c15ULL ^ h));
    }

    [[nodiscard]] std::uint64_t master_seed() const noexcept { return master_seed_; }
    [[nodiscard]] std::uint64_t stream_id() const noexcept { return stream_id_; }
    [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t master_seed_;
    std::uint64_t stream_id_;
    std::uint64_t seed_ = 0;
    std::uint64_t gamma_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace critgraph
