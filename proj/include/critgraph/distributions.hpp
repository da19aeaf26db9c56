#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "critgraph/errors.hpp"
#include "critgraph/rng.hpp"

namespace critgraph {

/// A point of the open simplex: strictly positive coordinates summing to one.
class SimplexVector {
public:
    static constexpr double tolerance = 1e-12;

    SimplexVector() = default;

    /// Normalizes `weights` (all positive) onto the simplex. The final renormalization keeps
    /// the sum within tolerance even after many incremental updates upstream.
    static SimplexVector from_weights(std::vector<double> weights) {
        if (weights.empty()) {
            throw parameter_error("simplex vector needs at least one coordinate");
        }
        double total = 0.0;
        for (const double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w)) {
                throw parameter_error("simplex weights must be positive and finite");
            }
            total += w;
        }
        for (double& w : weights) {
            w /= total;
        }
        // second pass absorbs the rounding of the first division
        const double drift = std::accumulate(weights.begin(), weights.end(), 0.0);
        for (double& w : weights) {
            w /= drift;
        }
        SimplexVector out;
        out.coords_ = std::move(weights);
        return out;
    }

    [[nodiscard]] std::size_t size() const noexcept { return coords_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return coords_[i]; }
    [[nodiscard]] std::span<const double> coordinates() const noexcept { return coords_; }
    [[nodiscard]] auto begin() const noexcept { return coords_.begin(); }
    [[nodiscard]] auto end() const noexcept { return coords_.end(); }

private:
    std::vector<double> coords_;
};

/// Exp(rate) by inversion.
inline double sample_exponential(RngStream& stream, double rate) {
    if (!(rate > 0.0)) {
        throw parameter_error("exponential rate must be positive");
    }
    return -std::log(stream.uniform()) / rate;
}

/// Standard normal via the Marsaglia polar method (no cached second variate, so every
/// call consumes a self-contained block of uniforms).
inline double sample_normal(RngStream& stream) {
    for (;;) {
        const double u = 2.0 * stream.uniform() - 1.0;
        const double v = 2.0 * stream.uniform() - 1.0;
        const double s = u * u + v * v;
        if (s > 0.0 && s < 1.0) {
            return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }
}

/// Gamma(shape, rate) with density rate^shape x^(shape-1) e^(-rate x) / Gamma(shape).
///
/// Marsaglia-Tsang squeeze for shape >= 1; shape < 1 uses the U^(1/shape) boost; shape == 1
/// is exact inversion of the exponential.
inline double sample_gamma(RngStream& stream, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate)) {
        throw parameter_error("gamma shape and rate must be positive");
    }
    if (shape == 1.0) {
        return -std::log(stream.uniform()) / rate;
    }
    if (shape < 1.0) {
        const double boosted = sample_gamma(stream, shape + 1.0, 1.0);
        return boosted * std::pow(stream.uniform(), 1.0 / shape) / rate;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = sample_normal(stream);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) {
            return d * v / rate;
        }
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
            return d * v / rate;
        }
    }
}

inline double sample_beta(RngStream& stream, double a, double b) {
    const double x = sample_gamma(stream, a, 1.0);
    const double y = sample_gamma(stream, b, 1.0);
    return x / (x + y);
}

/// Dirichlet(alphas) by normalizing independent Gamma(alpha_j, 1) draws.
inline SimplexVector sample_dirichlet(RngStream& stream, std::span<const double> alphas) {
    if (alphas.size() < 2) {
        throw parameter_error("dirichlet needs at least two parameters");
    }
    std::vector<double> draws;
    draws.reserve(alphas.size());
    for (const double a : alphas) {
        if (!(a > 0.0)) {
            throw parameter_error("dirichlet parameters must be positive");
        }
        draws.push_back(sample_gamma(stream, a, 1.0));
    }
    // A draw can underflow to 0 for tiny shapes; the simplex excludes the boundary.
    for (double& g : draws) {
        if (g <= 0.0) {
            g = std::numeric_limits<double>::min();
        }
    }
    return SimplexVector::from_weights(std::move(draws));
}

inline SimplexVector sample_dirichlet(RngStream& stream, std::size_t n, double alpha) {
    const std::vector<double> alphas(n, alpha);
    return sample_dirichlet(stream, alphas);
}

/// Rayleigh: density s e^{-s^2/2}, the square root of an Exp(1/2) draw.
inline double sample_rayleigh(RngStream& stream) {
    return std::sqrt(sample_exponential(stream, 0.5));
}

/// Index i with probability weights[i] / sum(weights). One uniform per call; ties on a
/// cumulative boundary go to the earlier index.
inline std::size_t size_biased_index(RngStream& stream, std::span<const double> weights) {
    double total = 0.0;
    for (const double w : weights) {
        total += w;
    }
    const double target = stream.uniform() * total;
    double running = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        running += weights[i];
        if (target <= running) {
            return i;
        }
    }
    return weights.size() - 1;
}

inline std::size_t size_biased_index(RngStream& stream, const SimplexVector& p) {
    return size_biased_index(stream, p.coordinates());
}

/// Law of the mixing index J_{r,s} in the generalized gamma duplication identity
///   A ~ Gamma(r, 1/2), B ~ Gamma(r + s - 1/2, 1/2):  AB =d C^2,  C ~ Gamma(2r + J - 1, 1).
///
/// P(J = j) = (2s-j-1)! (2r)_{j-1} / [ (s-j)! (j-1)! 2^{2s-j-1} (r+1/2)_{s-1} ],  j = 1..s.
/// The support is exactly {1, ..., s}; normalization is verified numerically on construction.
class DuplicationIndexDistribution {
public:
    DuplicationIndexDistribution(double r, long s) : r_(r), s_(s) {
        if (!(r > 0.0) || s < 1) {
            throw parameter_error("duplication index needs r > 0 and s >= 1");
        }
        pmf_.reserve(static_cast<std::size_t>(s));
        const double log_rising_half = std::lgamma(r + 0.5 + static_cast<double>(s - 1)) - std::lgamma(r + 0.5);
        double total = 0.0;
        for (long j = 1; j <= s; ++j) {
            const double jd = static_cast<double>(j);
            const double sd = static_cast<double>(s);
            const double log_rising_2r = std::lgamma(2.0 * r + jd - 1.0) - std::lgamma(2.0 * r);
            const double log_p = std::lgamma(2.0 * sd - jd) + log_rising_2r - std::lgamma(sd - jd + 1.0) -
                                 std::lgamma(jd) - (2.0 * sd - jd - 1.0) * std::log(2.0) - log_rising_half;
            pmf_.push_back(std::exp(log_p));
            total += pmf_.back();
        }
        if (std::abs(total - 1.0) > 1e-9) {
            throw parameter_error("duplication index pmf does not normalize (sum = " + std::to_string(total) + ")");
        }
    }

    [[nodiscard]] double r() const noexcept { return r_; }
    [[nodiscard]] long s() const noexcept { return s_; }
    /// pmf()[j-1] = P(J = j).
    [[nodiscard]] std::span<const double> pmf() const noexcept { return pmf_; }

    long operator()(RngStream& stream) const {
        return static_cast<long>(size_biased_index(stream, pmf_)) + 1;
    }

private:
    double r_;
    long s_;
    std::vector<double> pmf_;
};

inline long sample_duplication_index(RngStream& stream, double r, long s) {
    return DuplicationIndexDistribution(r, s)(stream);
}

} // namespace critgraph
