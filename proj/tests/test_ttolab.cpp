// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "qalybound/simulate.hpp"
#include "qalybound/ttolab.hpp"

using namespace qalybound;

namespace {
const HealthState kFull = HealthState::from_code("11111");
const HealthState kSick = HealthState::from_code("21312");
}  // namespace

TEST(RealizedQaly, Examples) {
    EXPECT_DOUBLE_EQ(realized_qaly(0.5, 7), 3.5);
    EXPECT_DOUBLE_EQ(realized_qaly(-0.3, 0), 0.0);
    EXPECT_DOUBLE_EQ(realized_qaly(1.0, 6), 6.0);
}

TEST(ElicitInterval, UnitBrackets) {
    EXPECT_EQ(elicit_interval(kSick, 0.5, 7), (QalyInterval{3, 4, false}));
    EXPECT_EQ(elicit_interval(kSick, -0.25, 1), (QalyInterval{-1, 0, false}));
    EXPECT_EQ(elicit_interval(kFull, 1.0, 6), (QalyInterval{6, 6, true}));
    EXPECT_EQ(elicit_interval(kSick, 0.7, 0), (QalyInterval{0, 0, true}));
    // Integer QALYs go to the lower bracket.
    EXPECT_EQ(elicit_interval(kSick, 0.5, 4), (QalyInterval{1, 2, false}));
    EXPECT_EQ(elicit_interval(kSick, -0.399, 10), (QalyInterval{-4, -3, false}));
    EXPECT_THROW(elicit_interval(kSick, -0.4, 3), std::invalid_argument);
    EXPECT_THROW(elicit_interval(kSick, 1.2, 3), std::invalid_argument);
    EXPECT_THROW(elicit_interval(kSick, 0.5, 11), std::invalid_argument);
}

TEST(ElicitInterval, UtilityTenths) {
    const auto iv = elicit_interval(kSick, 0.95, 10, BracketMode::utility_tenths);
    EXPECT_DOUBLE_EQ(iv.lo, 9.0);
    EXPECT_DOUBLE_EQ(iv.hi, 10.0);
    const auto iv2 = elicit_interval(kSick, 0.55, 4, BracketMode::utility_tenths);
    EXPECT_DOUBLE_EQ(iv2.lo, 2.0);
    EXPECT_DOUBLE_EQ(iv2.hi, 2.4);
}

TEST(Titration, WorkedExample) {
    const auto tr = titration_transcript(0.95);
    ASSERT_EQ(tr.steps.size(), 2u);
    EXPECT_TRUE(tr.steps[0].prefers_full_health);
    EXPECT_EQ(tr.steps[0].full_health_years, 10);
    EXPECT_FALSE(tr.steps[1].prefers_full_health);
    EXPECT_EQ(tr.bracket_lo, 9);
    EXPECT_EQ(tr.bracket_hi, 10);
    EXPECT_FALSE(tr.worse_than_dead);
}

TEST(Titration, WorseThanDead) {
    const auto tr = titration_transcript(-0.2);
    EXPECT_TRUE(tr.worse_than_dead);
    for (const auto& s : tr.steps) {
        if (s.full_health_years >= 0) {
            EXPECT_TRUE(s.prefers_full_health);
        }
    }
    EXPECT_EQ(tr.bracket_lo, -3);
    EXPECT_EQ(tr.bracket_hi, -2);
}

TEST(Titration, TieGoesToLowerBracket) {
    const auto tr = titration_transcript(0.5);
    EXPECT_TRUE(tr.tie);
    EXPECT_EQ(tr.bracket_lo, 4);
    EXPECT_EQ(tr.bracket_hi, 5);
    const auto flips = std::find_if(tr.steps.begin(), tr.steps.end(),
                                    [](const TitrationStep& s) { return s.indifferent; });
    ASSERT_NE(flips, tr.steps.end());
    EXPECT_EQ(flips->full_health_years, 5);
}

TEST(Titration, AgreesWithTenthsIntervalsOnDenseGrid) {
    for (int i = 1; i <= 14000; ++i) {
        const double q = 1.0 - i * 1e-4;
        if (!(q > -0.4)) break;
        const auto tr = titration_transcript(q);
        const auto iv = elicit_interval(kSick, q, 10, BracketMode::utility_tenths);
        ASSERT_DOUBLE_EQ(iv.lo, tr.bracket_lo) << q;
        ASSERT_DOUBLE_EQ(iv.hi, tr.bracket_hi) << q;
        ASSERT_LE(tr.bracket_lo, 10 * q);
        ASSERT_GE(tr.bracket_hi, 10 * q);
    }
}

TEST(ElicitInterval, ContainmentAndExactnessOnSimulatedSubjects) {
    for (auto mode : {BracketMode::qaly_unit, BracketMode::utility_tenths}) {
        SimConfig cfg;
        cfg.n = 50000;
        cfg.bracket_mode = mode;
        const auto ds = simulate_population(cfg);
        for (const auto& o : ds.observations) {
            ASSERT_TRUE(o.interval.contains(*o.oracle_qaly));
            ASSERT_LE(o.interval.lo, o.interval.hi);
            ASSERT_EQ(o.interval.exact, o.interval.lo == o.interval.hi);
            ASSERT_GE(o.interval.lo, -4.0);
            ASSERT_LE(o.interval.hi, 10.0);
            if (mode == BracketMode::qaly_unit) {
                ASSERT_EQ(o.interval.exact, o.state.is_full_health() || o.years_alive == 0);
                if (!o.interval.exact) {
                    ASSERT_EQ(o.interval.hi - o.interval.lo, 1.0);
                    ASSERT_EQ(o.interval.lo, std::floor(o.interval.lo));
                }
            }
        }
    }
}
