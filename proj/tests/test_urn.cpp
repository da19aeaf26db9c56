#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>
#include <vector>

#include "critgraph/errors.hpp"
#include "critgraph/kernel.hpp"
#include "critgraph/limit_sampler.hpp"
#include "critgraph/process.hpp"
#include "critgraph/stats.hpp"
#include "critgraph/urn.hpp"
#include "support.hpp"

using namespace critgraph;
using testing_support::draws;
namespace cdf = critgraph::stats::cdf;

constexpr std::size_t N = 100'000;

namespace {

UrnState fresh(RngStream& s, long k = 2) { return urn_init(sample_core_lengths(s, k)); }

std::uint64_t ball_count(const std::vector<std::uint64_t>& c) { return std::accumulate(c.begin(), c.end(), std::uint64_t{0}); }

} // namespace

TEST(UrnInit, OneBallPerColor) {
    RngStream s(301);
    for (const long k : {2L, 3L, 5L}) {
        const UrnState u = fresh(s, k);
        EXPECT_EQ(u.colors(), static_cast<std::size_t>(3 * k - 3));
        EXPECT_EQ(ball_count(u.counts), u.colors());
        for (const auto n : u.counts) {
            EXPECT_EQ(n, 1u);
        }
        EXPECT_EQ(u.step, 0u);
        EXPECT_NEAR(u.total, std::accumulate(u.lengths.begin(), u.lengths.end(), 0.0), 1e-12);
    }
    EXPECT_THROW(urn_init(sample_core_lengths(s, 1)), domain_error);
}

TEST(UrnInit, TotalSquaredIsGammaTwo) {
    RngStream s(302);
    const auto sq = draws(s, N, [](RngStream& r) {
        const double c = fresh(r).total;
        return c * c;
    });
    EXPECT_LT(stats::ks_one_sample(sq, cdf::gamma(2.0, 0.5)), 0.01);
}

TEST(UrnStep, Bookkeeping) {
    RngStream s(303);
    UrnState u = fresh(s, 3);
    for (std::size_t n = 1; n <= 500; ++n) {
        const double before = u.total;
        const std::uint64_t balls = ball_count(u.counts);
        u = urn_step(s, u);
        ASSERT_EQ(ball_count(u.counts), balls + 2);
        ASSERT_EQ(ball_count(u.counts), u.colors() + 2 * n);
        ASSERT_GT(u.total, before);
        ASSERT_EQ(u.step, n);
        for (const auto c : u.counts) {
            ASSERT_EQ(c % 2, 1u);
        }
    }
    EXPECT_NEAR(u.total, std::accumulate(u.lengths.begin(), u.lengths.end(), 0.0), 1e-9);
}

TEST(UrnStep, TotalAfterTenSteps) {
    // (m + 2n + 1) / 2 = (3 + 20 + 1) / 2
    RngStream s(304);
    const auto sq = draws(s, N, [](RngStream& r) {
        UrnState u = fresh(r);
        for (int i = 0; i < 10; ++i) {
            urn_advance(r, u);
        }
        return u.total * u.total;
    });
    EXPECT_LT(stats::ks_one_sample(sq, cdf::gamma(12.0, 0.5)), 0.01);
}

TEST(UrnStep, RatioOfConsecutiveTotals) {
    // density of C(n-1)/C(n) is proportional to v^{m + 2(n-1)}, i.e. Beta(m + 2n - 1, 1)
    for (const std::size_t n : {1u, 3u}) {
        RngStream s(305 + n);
        const auto ratio = draws(s, N, [&](RngStream& r) {
            UrnState u = fresh(r);
            for (std::size_t i = 1; i < n; ++i) {
                urn_advance(r, u);
            }
            const double before = u.total;
            urn_advance(r, u);
            return before / u.total;
        });
        const double a = 3.0 + 2.0 * double(n) - 1.0;
        EXPECT_LT(stats::ks_one_sample(ratio, cdf::beta(a, 1.0)), 0.01) << "n = " << n;
        if (n == 1) {
            // the transposed reading Beta(n + 2m - 1, 1) is visibly different (they agree at n = m)
            EXPECT_GT(stats::ks_one_sample(ratio, cdf::beta(double(n) + 6.0 - 1.0, 1.0)), 0.05);
        }
    }
}

TEST(UrnStep, ProportionsAreMartingale) {
    RngStream s(307);
    std::vector<double> inc;
    inc.reserve(N);
    for (std::size_t i = 0; i < N; ++i) {
        UrnState u = fresh(s);
        const double p = u.proportion(0);
        urn_advance(s, u);
        inc.push_back(u.proportion(0) - p);
    }
    const double m = stats::mean(inc);
    double var = 0.0;
    for (const double x : inc) {
        var += (x - m) * (x - m);
    }
    const double se = std::sqrt(var / double(N - 1) / double(N));
    EXPECT_LT(std::abs(m), 3.0 * se);
}

TEST(UrnRun, CheckpointsAndReplay) {
    RngStream a(308);
    RngStream b(308);
    const UrnState s0 = fresh(a);
    fresh(b);
    const auto x = urn_run(a, s0, 25, 10);
    const auto y = urn_run(b, s0, 25, 10);
    ASSERT_EQ(x.size(), 4u); // 0, 10, 20, 25
    EXPECT_EQ(x[0].step, 0u);
    EXPECT_EQ(x[1].step, 10u);
    EXPECT_EQ(x[3].step, 25u);
    for (std::size_t i = 0; i < x.size(); ++i) {
        EXPECT_EQ(x[i].lengths, y[i].lengths);
        EXPECT_EQ(x[i].counts, y[i].counts);
    }
    EXPECT_THROW(urn_run(a, s0, 5, 0), parameter_error);
}

TEST(UrnRun, ProportionLimitMarginal) {
    // Dirichlet(1/2 x 3) first marginal is Beta(1/2, 1)
    RngStream s(309);
    const auto p = draws(s, 10'000, [](RngStream& r) { return urn_run(r, fresh(r), 1000, 1000).back().proportion(0); });
    EXPECT_LT(stats::ks_one_sample(p, cdf::beta(0.5, 1.0)), 0.02);
}

TEST(UrnRun, ProportionsGivenCounts) {
    // given N(2), the proportions are Dirichlet(N(2)); test the largest class
    RngStream s(310);
    std::map<std::vector<std::uint64_t>, std::vector<double>> by_counts;
    for (std::size_t i = 0; i < N; ++i) {
        const UrnState u = urn_run(s, fresh(s), 2, 2).back();
        by_counts[u.counts].push_back(u.proportion(0));
    }
    const auto largest = std::max_element(by_counts.begin(), by_counts.end(),
                                          [](const auto& a, const auto& b) { return a.second.size() < b.second.size(); });
    const auto& counts = largest->first;
    const double n1 = double(counts[0]);
    ASSERT_GT(largest->second.size(), 5'000u);
    EXPECT_LT(stats::ks_one_sample(largest->second, cdf::beta(n1, 7.0 - n1)), 0.03);
    // every class, not just the largest, should fit when it has enough members
    for (const auto& [c, props] : by_counts) {
        if (props.size() >= 5'000) {
            EXPECT_LT(stats::ks_one_sample(props, cdf::beta(double(c[0]), 7.0 - double(c[0]))), 0.03);
        }
    }
}

TEST(UrnRun, FirstGapScaledByFinalShareIsRayleigh) {
    RngStream s(311);
    const auto x = draws(s, 10'000, [](RngStream& r) {
        const UrnState u0 = fresh(r);
        const UrnState end = urn_run(r, u0, 1000, 1000).back();
        return u0.lengths[0] / std::sqrt(end.proportion(0));
    });
    EXPECT_LT(stats::ks_one_sample(x, cdf::rayleigh()), 0.03);
}

TEST(Polya, BallConservation) {
    RngStream s(321);
    const auto run = polya_run(s, 4, 300, 1);
    ASSERT_EQ(run.size(), 301u);
    for (std::size_t n = 0; n < run.size(); ++n) {
        ASSERT_EQ(ball_count(run[n]), 4 + 2 * n);
    }
    EXPECT_THROW(polya_run(s, 1, 10), parameter_error);
}

TEST(Polya, TwoColorArcsine) {
    RngStream s(322);
    const auto p = draws(s, 10'000, [](RngStream& r) {
        const auto end = polya_run(r, 2, 10'000, 10'000).back();
        return double(end[0]) / double(2 + 2 * 10'000);
    });
    EXPECT_LT(stats::ks_one_sample(p, cdf::beta(0.5, 0.5)), 0.02);
}

TEST(Polya, Symmetry) {
    RngStream s(323);
    int low = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto end = polya_run(s, 2, 101, 101).back();
        low += 2 * end[0] <= end[0] + end[1] ? 1 : 0;
    }
    EXPECT_GE(double(low) / N, 0.49);
    EXPECT_LE(double(low) / N, 0.51);
}

TEST(Coupling, StickBreakingFromCoreDrivesTheUrn) {
    RngStream s(331);
    for (int rep = 0; rep < 50; ++rep) {
        const Multigraph kernel = sample_kernel(s, 3);
        const CoreLengths core = sample_core_lengths(s, 3);
        const CoreSkeleton sk = build_core_skeleton(kernel, core);
        const RngStream seed = s.child("coupling", static_cast<std::uint64_t>(rep));

        RngStream growth = seed.child("growth");
        RngStream place = seed.child("place");
        std::vector<UrnDraw> from_tree;
        const GluedSpace grown = stick_break(growth, place, sk.space, 200, [&](const GrowthEvent& e) {
            from_tree.push_back({e.color, e.amount});
        });

        RngStream urn_stream = seed.child("growth");
        UrnState u = urn_init(core);
        for (std::size_t i = 0; i < 200; ++i) {
            const UrnDraw d = urn_advance(urn_stream, u);
            ASSERT_EQ(d.color, from_tree[i].color) << "rep " << rep << " step " << i;
            ASSERT_EQ(d.amount, from_tree[i].amount);
        }
        // color lengths are the skeleton component lengths
        const MetricTree& t = grown.skeleton();
        std::vector<double> per_color(u.colors(), 0.0);
        for (const Edge& e : t.edges()) {
            per_color[t.component_of(e.parent)] += e.length;
        }
        for (std::size_t i = 0; i < u.colors(); ++i) {
            EXPECT_NEAR(per_color[i], u.lengths[i], 1e-9);
        }
    }
}
