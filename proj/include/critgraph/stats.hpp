#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "critgraph/errors.hpp"

namespace critgraph::stats {

/// Outcome of one goodness-of-fit gate. pass <=> statistic <= threshold.
struct TestReport {
    std::string test;
    std::size_t n = 0;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;

    static TestReport make(std::string name, std::size_t n, double statistic, double threshold, std::uint64_t seed) {
        return TestReport{std::move(name), n, statistic, threshold, statistic <= threshold, seed};
    }
};

using Cdf = std::function<double(double)>;

/// Kolmogorov-Smirnov statistic sup |ECDF - F| over the sample, checking the gap on both
/// sides of every jump.
inline double ks_one_sample(std::span<const double> sample, const Cdf& cdf) {
    if (sample.empty()) {
        throw parameter_error("ks_one_sample: empty sample");
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double below = static_cast<double>(i) / n;
        const double above = static_cast<double>(i + 1) / n;
        d = std::max({d, above - f, f - below});
    }
    return d;
}

/// Two-sample KS statistic sup |ECDF_a - ECDF_b|; tied values are consumed together.
inline double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) {
        throw parameter_error("ks_two_sample: empty sample");
    }
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size());
    const double ny = static_cast<double>(y.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] == v) {
            ++i;
        }
        while (j < y.size() && y[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t bins = 0; ///< after pooling
    [[nodiscard]] std::size_t degrees_of_freedom() const noexcept { return bins > 0 ? bins - 1 : 0; }
};

/// Pearson chi-square of observed counts against expected probabilities.
///
/// Bins are scanned in order and pooled until the pooled expected count reaches
/// `min_expected`; a short tail pool is merged into the previous one.
inline ChiSquareResult chi_square(std::span<const double> observed, std::span<const double> expected_probs,
                                  double min_expected = 5.0) {
    if (observed.size() != expected_probs.size() || observed.empty()) {
        throw parameter_error("chi_square: observed and expected must have the same nonzero length");
    }
    double total = 0.0;
    double prob_total = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (observed[i] < 0.0 || expected_probs[i] < 0.0) {
            throw parameter_error("chi_square: negative count or probability");
        }
        total += observed[i];
        prob_total += expected_probs[i];
    }
    if (!(total > 0.0)) {
        throw parameter_error("chi_square: no observations");
    }
    if (std::abs(prob_total - 1.0) > 1e-9) {
        throw parameter_error("chi_square: expected probabilities do not sum to 1");
    }

    std::vector<double> pooled_obs;
    std::vector<double> pooled_exp;
    double acc_obs = 0.0;
    double acc_exp = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        acc_obs += observed[i];
        acc_exp += total * expected_probs[i];
        if (acc_exp >= min_expected) {
            pooled_obs.push_back(acc_obs);
            pooled_exp.push_back(acc_exp);
            acc_obs = 0.0;
            acc_exp = 0.0;
        }
    }
    if (acc_exp > 0.0 || acc_obs > 0.0) {
        if (pooled_exp.empty()) {
            pooled_obs.push_back(acc_obs);
            pooled_exp.push_back(acc_exp);
        } else {
            pooled_obs.back() += acc_obs;
            pooled_exp.back() += acc_exp;
        }
    }
    if (pooled_exp.size() < 2) {
        throw parameter_error("chi_square: degenerate expected vector (fewer than two bins after pooling)");
    }

    ChiSquareResult result;
    result.bins = pooled_exp.size();
    for (std::size_t i = 0; i < pooled_exp.size(); ++i) {
        const double diff = pooled_obs[i] - pooled_exp[i];
        result.statistic += diff * diff / pooled_exp[i];
    }
    return result;
}

/// Upper quantile of the chi-square law, e.g. chi_square_critical(df, 0.001) for p = 0.001.
inline double chi_square_critical(std::size_t df, double upper_tail) {
    const boost::math::chi_squared dist(static_cast<double>(df));
    return boost::math::quantile(boost::math::complement(dist, upper_tail));
}

inline double mean(std::span<const double> xs) {
    double s = 0.0;
    for (const double x : xs) {
        s += x;
    }
    return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

namespace cdf {

/// Gamma(shape, rate) in the rate parameterization.
inline Cdf gamma(double shape, double rate) {
    return [shape, rate](double x) { return x <= 0.0 ? 0.0 : boost::math::gamma_p(shape, rate * x); };
}

inline Cdf beta(double a, double b) {
    return [a, b](double x) {
        if (x <= 0.0) {
            return 0.0;
        }
        if (x >= 1.0) {
            return 1.0;
        }
        return boost::math::ibeta(a, b, x);
    };
}

inline Cdf uniform01() {
    return [](double x) { return std::clamp(x, 0.0, 1.0); };
}

inline Cdf exponential(double rate) {
    return [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); };
}

inline Cdf rayleigh() {
    return [](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-0.5 * x * x); };
}

/// Law of |Z| for a standard normal Z.
inline Cdf half_normal() {
    return [](double x) { return x <= 0.0 ? 0.0 : std::erf(x / std::numbers::sqrt2); };
}

} // namespace cdf

} // namespace critgraph::stats
