// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qalybound/popmodel.hpp"

namespace qalybound {

/// Closed interval known to contain a subject's QALYs.
struct QalyInterval {
    double lo = 0.0;
    double hi = 0.0;
    bool exact = false;

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }

    static QalyInterval point(double x) noexcept { return {x, x, true}; }

    friend bool operator==(const QalyInterval&, const QalyInterval&) = default;
};

struct Observation {
    std::uint64_t id = 0;
    HealthState state;
    int years_alive = 0;
    double mortality = 0.0;
    QalyInterval interval;
    // Latent values; only serialized on request.
    std::optional<double> oracle_q;
    std::optional<double> oracle_qaly;

    friend bool operator==(const Observation&, const Observation&) = default;
};

namespace detail {
inline void check_utility_inputs(double q, int years) {
    if (!(q > -0.4 && q <= 1.0)) throw std::invalid_argument("utility must lie in (-0.4, 1]");
    if (years < 0 || years > kHorizon) throw std::invalid_argument("years alive must lie in [0, 10]");
}

// Index k of the unit bracket [k, k + 1] holding x; integer x goes to [x - 1, x].
inline int unit_bracket(double x) noexcept { return static_cast<int>(std::ceil(x)) - 1; }
}  // namespace detail

inline double realized_qaly(double q, int years_alive) noexcept { return q * years_alive; }

/*!
 * Interval revealed by a titrated TTO experiment.
 *
 * Full health and death in the first period are point-identified. Otherwise
 * qaly-unit mode reports the unit bracket holding the realized QALYs, and
 * utility-tenths mode brackets the utility into tenths and scales by years
 * alive.
 */
inline QalyInterval elicit_interval(const HealthState& state, double q, int years_alive,
                                    BracketMode mode = BracketMode::qaly_unit) {
    detail::check_utility_inputs(q, years_alive);
    const double x = realized_qaly(q, years_alive);
    if (state.is_full_health()) return QalyInterval::point(static_cast<double>(years_alive));
    if (years_alive == 0) return QalyInterval::point(0.0);
    if (mode == BracketMode::qaly_unit) {
        const int k = detail::unit_bracket(x);
        return {static_cast<double>(k), static_cast<double>(k + 1), false};
    }
    const int k = detail::unit_bracket(10.0 * q);
    return {years_alive * k / 10.0, years_alive * (k + 1) / 10.0, false};
}

//---------------------------------------------------------------------------//
// Titration

struct TitrationStep {
    int full_health_years = 0;       // offer: this many years in full health
    bool prefers_full_health = false;  // versus ten years in the target state
    bool indifferent = false;        // tie resolved toward full health
};

struct TitrationTranscript {
    std::vector<TitrationStep> steps;
    bool worse_than_dead = false;
    bool tie = false;
    // Revealed bracket for ten times the utility.
    int bracket_lo = 0;
    int bracket_hi = 0;
};

/*!
 * Answers a truthful subject with utility q gives to "d years in full
 * health versus ten years in h", for d = 10, 9, ..., 0 and then the
 * worse-than-dead continuation d = -1, ..., -4. Questioning stops at the
 * first "no".
 */
inline TitrationTranscript titration_transcript(double q) {
    detail::check_utility_inputs(q, kHorizon);
    const double value = 10.0 * q;
    TitrationTranscript tr;
    for (int d = kHorizon; d >= -4; --d) {
        TitrationStep step{d, d >= value, d == value};
        tr.steps.push_back(step);
        tr.tie = tr.tie || step.indifferent;
        if (d == 0 && step.prefers_full_health) tr.worse_than_dead = true;
        if (!step.prefers_full_health) {
            tr.bracket_lo = d;
            tr.bracket_hi = d + 1;
            return tr;
        }
    }
    throw std::invalid_argument("utility below the elicitation floor");
}

}  // namespace qalybound
