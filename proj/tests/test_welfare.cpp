// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qalybound/popmodel.hpp"
#include "qalybound/welfare.hpp"
#include "welfare_support.hpp"

using namespace qalybound;
using namespace qalybound::testing;

namespace {
EmpiricalDistribution coin() { return {{0.0, 2.0}, {0.5, 0.5}}; }

EmpiricalDistribution full_health_survival() {
    std::vector<double> support, probs;
    for (int y = 0; y <= 10; ++y) {
        support.push_back(y);
        probs.push_back(years_alive_probability(y, 0.05));
    }
    return {support, probs};
}
}  // namespace

TEST(Distribution, ValidatesInput) {
    EXPECT_THROW(EmpiricalDistribution({}, {}), std::invalid_argument);
    EXPECT_THROW(EmpiricalDistribution({1, 1}, {0.5, 0.5}), std::invalid_argument);
    EXPECT_THROW(EmpiricalDistribution({1, 2}, {0.5, 0.4}), std::invalid_argument);
    EXPECT_THROW(EmpiricalDistribution({1, 2}, {1.0, 0.0}), std::invalid_argument);
    const std::vector<double> sample{3, 1, 3, 2};
    const auto d = EmpiricalDistribution::from_sample(sample);
    EXPECT_EQ(d.size(), 3u);
    EXPECT_DOUBLE_EQ(d.cdf(2.0), 0.5);
    EXPECT_DOUBLE_EQ(d.mean(), 2.25);
}

TEST(QuantileOf, Examples) {
    for (double a : {0.01, 0.5, 1.0}) EXPECT_EQ(quantile_of(EmpiricalDistribution::point_mass(3), a), 3);
    EXPECT_EQ(quantile_of(coin(), 0.5), 0);
    EXPECT_EQ(quantile_of(coin(), 0.51), 2);
    EXPECT_EQ(quantile_of(full_health_survival(), 0.5), 10);
    EXPECT_EQ(quantile_of(full_health_survival(), 0.1), 2);
    EXPECT_EQ(quantile_of(full_health_survival(), 1e-9), 0);
    EXPECT_THROW(quantile_of(coin(), 0.0), std::domain_error);
}

TEST(Dominance, Examples) {
    const auto one = EmpiricalDistribution::point_mass(1);
    const auto zero = EmpiricalDistribution::point_mass(0);
    EXPECT_EQ(stochastic_dominance(one, zero), Dominance::a_strict);
    EXPECT_EQ(stochastic_dominance(zero, one), Dominance::b_strict);
    EXPECT_EQ(stochastic_dominance(coin(), coin()), Dominance::equal);
    EXPECT_EQ(stochastic_dominance(coin(), one), Dominance::incomparable);
    EXPECT_TRUE(weakly_dominates(one, zero));
    EXPECT_FALSE(weakly_dominates(zero, one));
}

TEST(Crossing, CoinVersusSure) {
    const auto r = single_crossing(coin(), EmpiricalDistribution::point_mass(1));
    EXPECT_EQ(r.kind, CrossingKind::single_crossing);
    EXPECT_TRUE(r.a_riskier);
    ASSERT_TRUE(r.p_star.has_value());
    EXPECT_DOUBLE_EQ(*r.p_star, 0.5);
    ASSERT_TRUE(r.u_star.has_value());
    EXPECT_GT(*r.u_star, 0.0);
    EXPECT_LE(*r.u_star, 1.0);
    EXPECT_EQ(*r.u_lo, 0.0);
    EXPECT_EQ(r.sign_changes, 1);

    const auto flipped = single_crossing(EmpiricalDistribution::point_mass(1), coin());
    EXPECT_FALSE(flipped.a_riskier);
    EXPECT_DOUBLE_EQ(*flipped.p_star, 0.5);
}

TEST(Crossing, IdenticalDominanceAndMultiple) {
    EXPECT_EQ(single_crossing(coin(), coin()).kind, CrossingKind::identical);
    const auto dom = single_crossing(EmpiricalDistribution::point_mass(3), coin());
    EXPECT_EQ(dom.kind, CrossingKind::dominance);
    EXPECT_FALSE(dom.u_star.has_value());
    const EmpiricalDistribution a({0, 2, 4}, {0.25, 0.5, 0.25});
    const EmpiricalDistribution b({1, 3, 5}, {0.5, 0.25, 0.25});
    const auto m = single_crossing(a, b);
    EXPECT_EQ(m.kind, CrossingKind::multiple_crossing);
    EXPECT_EQ(m.sign_changes, 2);
}

TEST(Sequential, Examples) {
    const auto a = coin();
    const auto b = EmpiricalDistribution::point_mass(1);
    const std::vector<double> seq{0.4, 0.9};
    const auto v = compare_sequential(a, b, seq);
    EXPECT_EQ(v.preference, -1);
    EXPECT_EQ(*v.deciding_alpha, 0.4);
    EXPECT_EQ(compare_sequential(a, a, seq).preference, 0);
    EXPECT_FALSE(compare_sequential(a, a, seq).deciding_alpha.has_value());

    const std::vector<NamedDistribution> acts{{"A", a}, {"B", b}, {"A2", a}};
    const auto ranked = sequential_quantile_max(acts, seq);
    EXPECT_EQ(ranked[0].name, "B");
    EXPECT_EQ(ranked[1].rank, 1);
    EXPECT_EQ(ranked[2].rank, 1);
    EXPECT_THROW(compare_sequential(a, b, std::vector<double>{}), std::invalid_argument);
}

TEST(DeltaD, Examples) {
    const auto a = coin();
    const auto b = EmpiricalDistribution::point_mass(1);
    EXPECT_EQ(delta_d(a, a, 0.3), 0);
    EXPECT_EQ(delta_d(a, b, 0.4), -1);
    EXPECT_EQ(delta_d(a, b, 0.9), 1);
    const auto shifted = a.transformed([](double x) { return x + 2.5; });
    for (double al : {0.1, 0.5, 0.7, 1.0}) EXPECT_EQ(delta_d(shifted, a, al), 2.5);
}

TEST(Properties, LevyKroll) {
    Stream rng(1, 0, Purpose::property);
    for (int t = 0; t < 300; ++t) {
        const auto a = random_distribution(rng);
        const auto b = t % 3 == 0 ? dominating_shift(rng, a) : random_distribution(rng);
        ASSERT_TRUE(levy_kroll_holds(a, b)) << t;
        ASSERT_TRUE(levy_kroll_holds(b, a)) << t;
    }
}

TEST(Properties, WeakDominanceRespected) {
    Stream rng(2, 0, Purpose::property);
    for (int t = 0; t < 300; ++t) {
        const auto b = random_distribution(rng);
        const auto a = dominating_shift(rng, b);
        ASSERT_TRUE(weakly_dominates(a, b));
        for (double al : merged_probability_grid(a, b)) ASSERT_GE(a.quantile(al), b.quantile(al));
        ASSERT_TRUE(seqmax_strictly_prefers(a, b));
    }
}

TEST(Properties, Proposition3) {
    Stream rng(3, 0, Purpose::property);
    int tested = 0;
    while (tested < 200) {
        const auto safe = random_distribution(rng);
        if (safe.size() < 2) continue;
        const auto risky = stretched(rng, safe);
        const auto r = single_crossing(risky, safe);
        ASSERT_EQ(r.kind, CrossingKind::single_crossing);
        ASSERT_TRUE(r.a_riskier);
        ASSERT_TRUE(proposition3_holds(risky, safe, r));
        ++tested;
    }
}

TEST(Properties, OrdinalInvariance) {
    Stream rng(4, 0, Purpose::property);
    for (int t = 0; t < 50; ++t) {
        const auto g = MonotoneMap::random(rng);
        for (int k = 0; k < 10; ++k) {
            const auto a = random_distribution(rng);
            const auto b = k % 2 ? random_distribution(rng) : stretched(rng, a.size() > 1 ? a : coin());
            ASSERT_TRUE(ordinal_invariance_holds(a, b, g));
        }
    }
}
