#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include "critgraph/distributions.hpp"
#include "critgraph/errors.hpp"
#include "critgraph/rng.hpp"
#include "critgraph/stats.hpp"
#include "support.hpp"

using namespace critgraph;
using testing_support::draws;
namespace cdf = critgraph::stats::cdf;

constexpr std::size_t N = 100'000;

TEST(RngStream, ReplaysBitIdentically) {
    RngStream a(123);
    RngStream b(123);
    for (int i = 0; i < 1000; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
    RngStream c = RngStream(123).child("x", 4);
    RngStream d = RngStream(123).child("x", 4);
    EXPECT_EQ(c.stream_id(), d.stream_id());
    EXPECT_EQ(c.uniform(), d.uniform());
}

TEST(RngStream, ChildrenDifferByLabelAndIndex) {
    const RngStream root(9);
    EXPECT_NE(root.child("a").stream_id(), root.child("b").stream_id());
    EXPECT_NE(root.child("a", 0).stream_id(), root.child("a", 1).stream_id());
    EXPECT_NE(RngStream(9).next_u64(), RngStream(10).next_u64());
}

TEST(RngStream, UniformsInOpenUnitInterval) {
    RngStream s(1);
    for (std::size_t i = 0; i < N; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

TEST(RngStream, SiblingStreamsLookIndependent) {
    const RngStream root(2024);
    RngStream a = root.child("left");
    RngStream b = root.child("right");
    const auto xs = draws(a, N, [](RngStream& s) { return s.uniform(); });
    const auto ys = draws(b, N, [](RngStream& s) { return s.uniform(); });
    EXPECT_LT(stats::ks_two_sample(xs, ys), 0.01);
    EXPECT_LT(stats::ks_one_sample(xs, cdf::uniform01()), 0.01);
    // paired values should be uncorrelated too
    double cov = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        cov += (xs[i] - 0.5) * (ys[i] - 0.5);
    }
    EXPECT_LT(std::abs(cov / N), 3.0 * (1.0 / 12.0) / std::sqrt(double(N)));
}

TEST(RngStream, BelowIsUniformOnRange) {
    RngStream s(5);
    std::vector<double> counts(7, 0.0);
    for (int i = 0; i < 70'000; ++i) {
        counts[s.below(7)] += 1.0;
    }
    const std::vector<double> p(7, 1.0 / 7.0);
    EXPECT_LT(stats::chi_square(counts, p).statistic, stats::chi_square_critical(6, 0.001));
}

TEST(Gamma, ShapeOneIsExponentialMeanTwo) {
    RngStream s(11);
    const auto x = draws(s, N, [](RngStream& r) { return sample_gamma(r, 1.0, 0.5); });
    const double m = stats::mean(x);
    EXPECT_GE(m, 1.96);
    EXPECT_LE(m, 2.04);
}

TEST(Gamma, ShapeTwoMeanFour) {
    RngStream s(12);
    const auto x = draws(s, N, [](RngStream& r) { return sample_gamma(r, 2.0, 0.5); });
    const double m = stats::mean(x);
    EXPECT_GE(m, 3.92);
    EXPECT_LE(m, 4.08);
}

TEST(Gamma, RootOfHalfShapeIsHalfNormal) {
    RngStream s(13);
    const auto x = draws(s, N, [](RngStream& r) { return std::sqrt(sample_gamma(r, 0.5, 0.5)); });
    EXPECT_LT(stats::ks_one_sample(x, cdf::half_normal()), 0.01);
}

TEST(Gamma, SmallShapesMatchCdf) {
    for (const double shape : {0.2, 0.7, 3.5}) {
        RngStream s(14);
        const auto x = draws(s, N, [&](RngStream& r) { return sample_gamma(r, shape, 2.0); });
        EXPECT_LT(stats::ks_one_sample(x, cdf::gamma(shape, 2.0)), 0.01) << "shape " << shape;
    }
}

TEST(Gamma, RejectsBadParameters) {
    RngStream s(1);
    EXPECT_THROW(sample_gamma(s, 0.0, 1.0), parameter_error);
    EXPECT_THROW(sample_gamma(s, 1.0, -1.0), parameter_error);
    EXPECT_THROW(sample_gamma(s, std::nan(""), 1.0), parameter_error);
}

TEST(Dirichlet, FlatMarginalsAreBetaOneTwo) {
    RngStream s(21);
    const std::vector<double> alphas{1.0, 1.0, 1.0};
    std::vector<std::vector<double>> coords(3);
    for (std::size_t i = 0; i < N; ++i) {
        const auto x = sample_dirichlet(s, alphas);
        for (std::size_t j = 0; j < 3; ++j) {
            coords[j].push_back(x[j]);
        }
    }
    for (const auto& c : coords) {
        EXPECT_LT(stats::ks_one_sample(c, cdf::beta(1.0, 2.0)), 0.01);
    }
}

TEST(Dirichlet, CoordinatesOnSimplex) {
    RngStream s(22);
    const std::vector<double> alphas{0.5, 0.5};
    for (int i = 0; i < 10'000; ++i) {
        const auto x = sample_dirichlet(s, alphas);
        const auto c = x.coordinates();
        ASSERT_NEAR(std::accumulate(c.begin(), c.end(), 0.0), 1.0, 1e-12);
        ASSERT_TRUE(std::all_of(c.begin(), c.end(), [](double v) { return v > 0.0; }));
    }
}

TEST(Dirichlet, SymmetricMeanIsOneThird) {
    RngStream s(23);
    const auto x = draws(s, N, [](RngStream& r) { return sample_dirichlet(r, 3, 0.5)[0]; });
    const double m = stats::mean(x);
    EXPECT_GE(m, 0.329);
    EXPECT_LE(m, 0.338);
}

TEST(Dirichlet, RejectsBadAlphas) {
    RngStream s(1);
    const std::vector<double> one{1.0};
    const std::vector<double> neg{1.0, -0.5};
    EXPECT_THROW(sample_dirichlet(s, one), parameter_error);
    EXPECT_THROW(sample_dirichlet(s, neg), parameter_error);
}

TEST(Rayleigh, MeanIsRootHalfPi) {
    RngStream s(31);
    const auto x = draws(s, N, [](RngStream& r) { return sample_rayleigh(r); });
    const double m = stats::mean(x);
    EXPECT_NEAR(std::sqrt(std::numbers::pi / 2.0), 1.2533, 1e-4);
    EXPECT_GE(m, 1.241);
    EXPECT_LE(m, 1.266);
}

TEST(Rayleigh, SurvivalTransformIsUniform) {
    RngStream s(32);
    const auto x = draws(s, N, [](RngStream& r) {
        const double d = sample_rayleigh(r);
        return std::exp(-d * d / 2.0);
    });
    EXPECT_LT(stats::ks_one_sample(x, cdf::uniform01()), 0.01);
}

TEST(Rayleigh, SquareIsExponentialHalf) {
    RngStream s(33);
    const auto x = draws(s, N, [](RngStream& r) {
        const double d = sample_rayleigh(r);
        return d * d;
    });
    EXPECT_LT(stats::ks_one_sample(x, cdf::exponential(0.5)), 0.01);
}

TEST(SizeBiased, DegenerateWeightsPickTheAtom) {
    RngStream s(41);
    const std::vector<double> w{1.0, 1e-9, 1e-9, 1e-9};
    int zero = 0;
    for (std::size_t i = 0; i < N; ++i) {
        zero += size_biased_index(s, w) == 0 ? 1 : 0;
    }
    EXPECT_GE(zero, 0.999 * N);
}

TEST(SizeBiased, FairCoin) {
    RngStream s(42);
    const auto p = SimplexVector::from_weights({0.5, 0.5});
    int zero = 0;
    for (std::size_t i = 0; i < N; ++i) {
        zero += size_biased_index(s, p) == 0 ? 1 : 0;
    }
    EXPECT_GE(zero, 0.495 * N);
    EXPECT_LE(zero, 0.505 * N);
}

TEST(SizeBiased, PickedCoordinateOfFlatDirichletIsBetaTwoTwo) {
    RngStream s(43);
    std::vector<double> accepted;
    while (accepted.size() < N) {
        const auto p = sample_dirichlet(s, 3, 1.0);
        if (size_biased_index(s, p) == 0) {
            accepted.push_back(p[0]);
        }
    }
    EXPECT_LT(stats::ks_one_sample(accepted, cdf::beta(2.0, 2.0)), 0.015);
}

TEST(Duplication, SingleSupportPoint) {
    for (const double r : {0.3, 1.0, 4.0}) {
        const DuplicationIndexDistribution d(r, 1);
        ASSERT_EQ(d.pmf().size(), 1u);
        EXPECT_NEAR(d.pmf()[0], 1.0, 1e-12);
        RngStream s(51);
        for (int i = 0; i < 100; ++i) {
            EXPECT_EQ(d(s), 1);
        }
    }
}

// (2s-j-1)! (2r)_{j-1} / [(s-j)! (j-1)! 2^{2s-j-1} (r+1/2)_{s-1}] at r = 1, s = 2:
// j = 1: 2! * 1 / (1 * 1 * 4 * 3/2) = 1/3;  j = 2: 1! * 2 / (1 * 1 * 2 * 3/2) = 2/3.
TEST(Duplication, PmfAtROneSTwo) {
    const DuplicationIndexDistribution d(1.0, 2);
    EXPECT_NEAR(d.pmf()[0], 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(d.pmf()[1], 2.0 / 3.0, 1e-12);
    RngStream s(52);
    int ones = 0;
    for (std::size_t i = 0; i < N; ++i) {
        ones += d(s) == 1 ? 1 : 0;
    }
    EXPECT_NEAR(double(ones) / N, 1.0 / 3.0, 0.01);
}

TEST(Duplication, NormalizesAcrossParameters) {
    for (const double r : {0.1, 0.5, 1.0, 2.5, 10.0}) {
        for (const long s : {1L, 2L, 3L, 7L, 20L}) {
            const DuplicationIndexDistribution d(r, s);
            const auto p = d.pmf();
            EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
            EXPECT_TRUE(std::all_of(p.begin(), p.end(), [](double v) { return v > 0.0; }));
        }
    }
}

TEST(Duplication, RejectsBadParameters) {
    EXPECT_THROW(DuplicationIndexDistribution(0.0, 2), parameter_error);
    EXPECT_THROW(DuplicationIndexDistribution(1.0, 0), parameter_error);
}

TEST(BetaGamma, ProductOfGammaAndBeta) {
    RngStream s(61);
    const auto lhs = draws(s, N, [](RngStream& r) { return sample_gamma(r, 1.0, 0.5) * sample_beta(r, 0.5, 0.5); });
    const auto rhs = draws(s, N, [](RngStream& r) { return sample_gamma(r, 0.5, 0.5); });
    EXPECT_LT(stats::ks_two_sample(lhs, rhs), 0.01);
}

TEST(BetaGamma, Duplication) {
    for (const double t : {0.5, 1.0}) {
        RngStream s(62);
        const auto ab = draws(s, N, [&](RngStream& r) { return sample_gamma(r, t, 0.5) * sample_gamma(r, t + 0.5, 0.5); });
        const auto c2 = draws(s, N, [&](RngStream& r) {
            const double c = sample_gamma(r, 2.0 * t, 1.0);
            return c * c;
        });
        EXPECT_LT(stats::ks_two_sample(ab, c2), 0.01) << "t = " << t;
    }
}

TEST(BetaGamma, MixedDuplication) {
    const double r0 = 1.0;
    const long s0 = 2;
    const DuplicationIndexDistribution j(r0, s0);
    RngStream s(63);
    const auto ab = draws(s, N, [&](RngStream& r) {
        return sample_gamma(r, r0, 0.5) * sample_gamma(r, r0 + double(s0) - 0.5, 0.5);
    });
    const auto c2 = draws(s, N, [&](RngStream& r) {
        const double c = sample_gamma(r, 2.0 * r0 + double(j(r)) - 1.0, 1.0);
        return c * c;
    });
    EXPECT_LT(stats::ks_two_sample(ab, c2), 0.01);
}

TEST(BetaGamma, RayleighDirichlet) {
    RngStream s(64);
    const std::vector<double> halves{0.5, 0.5, 0.5};
    std::vector<std::vector<double>> lhs(4);
    std::vector<std::vector<double>> rhs(4);
    for (std::size_t i = 0; i < N; ++i) {
        const auto x = sample_dirichlet(s, halves);
        const double g = std::sqrt(sample_gamma(s, 2.0, 0.5));
        const auto y = sample_dirichlet(s, 3, 1.0);
        double sl = 0.0;
        double sr = 0.0;
        for (std::size_t c = 0; c < 3; ++c) {
            const double a = sample_rayleigh(s) * std::sqrt(x[c]);
            const double b = g * y[c];
            lhs[c].push_back(a);
            rhs[c].push_back(b);
            sl += a;
            sr += b;
        }
        lhs[3].push_back(sl);
        rhs[3].push_back(sr);
    }
    for (std::size_t c = 0; c < 4; ++c) {
        EXPECT_LT(stats::ks_two_sample(lhs[c], rhs[c]), 0.01) << "column " << c;
    }
}
