// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "qalybound/normal.hpp"
#include "qalybound/popmodel.hpp"
#include "qalybound/rng.hpp"

using namespace qalybound;

namespace {
// Independent oracle: the product form evaluated directly.
double utility_oracle(const PreferenceParams& p, const HealthState& h) {
    double prod = 1.0;
    for (int k = 0; k < kDimensions; ++k) prod *= std::pow(p.u[k], p.c[k] * (h.level(k) - 1));
    return (1.0 + p.w) * prod - p.w;
}

PreferenceParams uniform_params(double u, double c, double w) {
    PreferenceParams p;
    p.u.fill(u);
    p.c.fill(c);
    p.w = w;
    return p;
}
}  // namespace

TEST(Stream, IsDeterministicAndKeyed) {
    Stream a(5, 17, Purpose::preferences), b(5, 17, Purpose::preferences);
    Stream c(5, 17, Purpose::survival), d(5, 18, Purpose::preferences);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        EXPECT_EQ(x, b.next());
        EXPECT_NE(x, c.next());
        EXPECT_NE(x, d.next());
    }
    EXPECT_EQ(a.counter(), 100u);
}

TEST(Stream, UniformRangesAndMoments) {
    Stream s(1, 2, Purpose::property);
    double sum = 0.0, sum2 = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = s.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const double v = s.uniform_open();
        ASSERT_GT(v, 0.0);
        ASSERT_LT(v, 1.0);
        sum += u;
        sum2 += u * u;
    }
    EXPECT_NEAR(sum / n, 0.5, 0.003);
    EXPECT_NEAR(sum2 / n - (sum / n) * (sum / n), 1.0 / 12.0, 0.002);
}

TEST(HealthState, CodesAndIndices) {
    std::set<std::string> codes;
    for (int i = 0; i < kStateCount; ++i) {
        const auto h = HealthState::from_index(i);
        EXPECT_EQ(h.index(), i);
        EXPECT_EQ(HealthState::from_code(h.code()), h);
        codes.insert(h.code());
    }
    EXPECT_EQ(codes.size(), 243u);
    EXPECT_TRUE(HealthState::from_code("11111").is_full_health());
    EXPECT_FALSE(HealthState::from_code("11112").is_full_health());
    EXPECT_EQ(HealthState::from_code("12311").level(2), 3);
    EXPECT_EQ(HealthState::from_code("33333").level_sum(), 15);
    EXPECT_THROW(HealthState::from_code("1111"), std::invalid_argument);
    EXPECT_THROW(HealthState::from_code("11141"), std::invalid_argument);
}

TEST(Utility, SpecExamples) {
    EXPECT_NEAR(health_state_utility(uniform_params(0.4, 0.9, 0.4), HealthState::from_code("33333")),
                1.4 * std::pow(0.4, 9) - 0.4, 1e-12);
    EXPECT_NEAR(health_state_utility(uniform_params(0.4, 0.9, 0.4), HealthState::from_code("33333")), -0.399633,
                1e-6);
    PreferenceParams p = uniform_params(0.9, 0.3, 0.0);
    p.u[0] = 0.5;
    p.c[0] = 0.5;
    EXPECT_NEAR(health_state_utility(p, HealthState::from_code("21111")), 0.707107, 1e-6);
}

TEST(Utility, ExhaustiveRangeMonotonicityAndFullHealth) {
    const SimConfig cfg;
    for (std::uint64_t subject = 0; subject < 300; ++subject) {
        Stream rng(cfg.seed, subject, Purpose::preferences);
        const auto p = sample_preferences(rng, cfg);
        std::array<double, kStateCount> q{};
        for (int i = 0; i < kStateCount; ++i) {
            const auto h = HealthState::from_index(i);
            q[i] = health_state_utility(p, h);
            ASSERT_GT(q[i], -0.4);
            ASSERT_LE(q[i], 1.0);
            ASSERT_NEAR(q[i], utility_oracle(p, h), 1e-12);
            ASSERT_EQ(q[i] == 1.0, h.is_full_health()) << h.code();
        }
        for (int i = 0; i < kStateCount; ++i) {
            const auto h = HealthState::from_index(i);
            for (int k = 0; k < kDimensions; ++k) {
                if (h.level(k) == 3) continue;
                auto levels = h.levels();
                ++levels[k];
                ASSERT_LT(q[HealthState(levels).index()], q[i]);
            }
        }
    }
}

TEST(Preferences, RangesAndMoments) {
    const SimConfig cfg;
    const int n = 100000;
    std::array<double, kDimensions> sum_u{};
    double sum_w = 0.0;
    for (int i = 0; i < n; ++i) {
        Stream rng(cfg.seed, static_cast<std::uint64_t>(i), Purpose::preferences);
        const auto p = sample_preferences(rng, cfg);
        for (int k = 0; k < kDimensions; ++k) {
            ASSERT_GE(p.u[k], 0.4);
            ASSERT_LE(p.u[k], 0.9);
            ASSERT_GE(p.c[k], 0.3);
            ASSERT_LE(p.c[k], 0.9);
            sum_u[k] += p.u[k];
        }
        ASSERT_GE(p.w, 0.0);
        ASSERT_LE(p.w, 0.4);
        sum_w += p.w;
    }
    for (double s : sum_u) EXPECT_NEAR(s / n, 0.65, 0.005);
    EXPECT_NEAR(sum_w / n, 0.2, 0.004);

    Stream a(cfg.seed, 42, Purpose::preferences), b(cfg.seed, 42, Purpose::preferences);
    const auto pa = sample_preferences(a, cfg), pb = sample_preferences(b, cfg);
    EXPECT_EQ(pa.u, pb.u);
    EXPECT_EQ(pa.c, pb.c);
    EXPECT_EQ(pa.w, pb.w);
}

TEST(Cutpoints, OrderingAndMoments) {
    const int n = 100000;
    std::array<double, kDimensions> sum{};
    for (int i = 0; i < n; ++i) {
        Stream rng(3, static_cast<std::uint64_t>(i), Purpose::cutpoints);
        const auto cp = sample_cutpoints(rng);
        for (int k = 0; k < kDimensions; ++k) {
            ASSERT_LE(cp.t1[k], cp.t2[k]);
            ASSERT_LE(cp.t2[k], 2.0);
            sum[k] += cp.t1[k];
        }
    }
    for (double s : sum) EXPECT_NEAR(s / n, 0.5, 0.005);
}

TEST(HealthLevels, ThresholdsAndFrequencies) {
    EXPECT_EQ(level_from_uniform(0.3, 0.0, 2.0), 1);
    EXPECT_EQ(level_from_uniform(0.99, 0.0, 2.0), 3);
    EXPECT_EQ(level_from_uniform(0.7, 0.0, 2.0), 2);

    CutpointParams cp;
    cp.t1.fill(0.0);
    cp.t2.fill(2.0);
    const int n = 200000;
    std::array<int, 3> counts{};
    for (int i = 0; i < n; ++i) {
        Stream rng(9, static_cast<std::uint64_t>(i), Purpose::health);
        ++counts[sample_health_state(cp, rng).level(0) - 1];
    }
    const std::array<double, 3> expected{0.5, 0.47725, 0.02275};
    for (int l = 0; l < 3; ++l) {
        const double sd = std::sqrt(expected[l] * (1 - expected[l]) / n);
        EXPECT_NEAR(static_cast<double>(counts[l]) / n, expected[l], 4 * sd);
    }
}

TEST(HealthLevels, LevelOneIsModalUnderPerSubjectCutpoints) {
    const int n = 100000;
    std::array<std::array<int, 3>, kDimensions> counts{};
    for (int i = 0; i < n; ++i) {
        Stream cr(11, static_cast<std::uint64_t>(i), Purpose::cutpoints);
        Stream hr(11, static_cast<std::uint64_t>(i), Purpose::health);
        const auto h = sample_health_state(sample_cutpoints(cr), hr);
        for (int k = 0; k < kDimensions; ++k) ++counts[k][h.level(k) - 1];
    }
    for (const auto& c : counts) {
        EXPECT_GE(c[0], n / 2);
        EXPECT_LE(c[1], n / 2);
    }
}

TEST(NormalCdf, ReferenceValues) {
    EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
    EXPECT_NEAR(normal_cdf(2.0), 0.977250, 5e-7);
    EXPECT_NEAR(normal_cdf(-1.96), 0.024998, 5e-7);
    EXPECT_NEAR(normal_cdf(2.0), 0.97724986805182079, 1e-14);
    EXPECT_NEAR(normal_cdf(-1.96), 0.024997895148220435, 1e-14);
    double prev = 0.0;
    for (double z = -10.0; z <= 10.0; z += 0.01) {
        const double f = normal_cdf(z);
        ASSERT_GE(f, prev);
        prev = f;
    }
}

TEST(NormalCdf, QuantileInvertsAndLogTailIsFinite) {
    for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999}) {
        EXPECT_NEAR(normal_cdf(normal_quantile(p)), p, 1e-12 + 1e-9 * p);
    }
    EXPECT_TRUE(std::isfinite(log_normal_cdf(-60.0)));
    EXPECT_NEAR(log_normal_cdf(-60.0), -1800.0 - std::log(60.0 * std::sqrt(2 * M_PI)) - 1.0 / 3600.0, 1e-6);
    EXPECT_NEAR(log_normal_cdf(-5.0), std::log(normal_cdf(-5.0)), 1e-12);
}

TEST(Survival, MortalityAndExpectations) {
    EXPECT_DOUBLE_EQ(mortality_probability(HealthState::from_code("11111")), 0.05);
    EXPECT_NEAR(mortality_probability(HealthState::from_code("33333")), 0.15, 1e-15);
    EXPECT_NEAR(expected_years_alive(0.05), 19.0 * (1.0 - std::pow(0.95, 10)), 1e-12);
    EXPECT_NEAR(expected_years_alive(0.15), 0.85 / 0.15 * (1.0 - std::pow(0.85, 10)), 1e-12);
    EXPECT_NEAR(expected_years_alive(1e-12), 10.0, 1e-9);
    EXPECT_THROW(expected_years_alive(0.0), std::domain_error);
    EXPECT_THROW(expected_years_alive(1.0), std::domain_error);
    EXPECT_DOUBLE_EQ(years_alive_probability(0, 0.05), 0.05);
    EXPECT_NEAR(years_alive_probability(10, 0.15), 0.19687, 5e-6);
    double total = 0.0;
    for (int y = 0; y <= 10; ++y) total += years_alive_probability(y, 0.12);
    EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(Survival, FrequenciesMatchGeometricLaw) {
    const auto h = HealthState::from_code("23121");
    const double p = mortality_probability(h);
    const int n = 1000000;
    std::array<int, 11> counts{};
    for (int i = 0; i < n; ++i) {
        Stream rng(77, static_cast<std::uint64_t>(i), Purpose::survival);
        const auto rec = sample_survival(h, rng);
        ASSERT_EQ(rng.counter(), 10u);
        ++counts[rec.years_alive];
    }
    for (int y = 0; y <= 10; ++y) {
        const double py = years_alive_probability(y, p);
        EXPECT_NEAR(static_cast<double>(counts[y]) / n, py, 4 * std::sqrt(py * (1 - py) / n)) << "y=" << y;
    }
}
