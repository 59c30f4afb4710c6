// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qalybound/normal.hpp"
#include "qalybound/rng.hpp"

namespace qalybound {

inline constexpr int kDimensions = 5;
inline constexpr int kStateCount = 243;
inline constexpr int kHorizon = 10;

//---------------------------------------------------------------------------//
/*!
 * EQ-5D-3L profile: five dimensions with levels 1 (no problems) to 3
 * (severe problems). Code "11111" is full health.
 */
class HealthState {
  public:
    using Levels = std::array<std::uint8_t, kDimensions>;

    constexpr HealthState() noexcept : levels_{1, 1, 1, 1, 1} {}

    constexpr explicit HealthState(const Levels& levels) : levels_(levels) {
        for (auto l : levels_) {
            if (l < 1 || l > 3) throw std::invalid_argument("health level must be 1, 2 or 3");
        }
    }

    static HealthState from_code(std::string_view code) {
        if (code.size() != kDimensions) {
            throw std::invalid_argument("health state code must have 5 digits: '" +
                                        std::string(code) + "'");
        }
        Levels levels{};
        for (int k = 0; k < kDimensions; ++k) {
            const char ch = code[k];
            if (ch < '1' || ch > '3') {
                throw std::invalid_argument("health state code digits must be 1-3: '" +
                                            std::string(code) + "'");
            }
            levels[k] = static_cast<std::uint8_t>(ch - '0');
        }
        return HealthState(levels);
    }

    /// Inverse of index(): base-3 digits, dimension 1 most significant.
    static HealthState from_index(int index) {
        if (index < 0 || index >= kStateCount) throw std::out_of_range("health state index");
        Levels levels{};
        for (int k = kDimensions - 1; k >= 0; --k) {
            levels[k] = static_cast<std::uint8_t>(index % 3 + 1);
            index /= 3;
        }
        return HealthState(levels);
    }

    constexpr int level(int k) const { return levels_[k]; }
    constexpr const Levels& levels() const noexcept { return levels_; }

    /// Position in lexicographic code order, 0 ("11111") to 242 ("33333").
    constexpr int index() const noexcept {
        int idx = 0;
        for (auto l : levels_) idx = idx * 3 + (l - 1);
        return idx;
    }

    constexpr int level_sum() const noexcept {
        int s = 0;
        for (auto l : levels_) s += l;
        return s;
    }

    constexpr bool is_full_health() const noexcept { return level_sum() == kDimensions; }

    std::string code() const {
        std::string s(kDimensions, '1');
        for (int k = 0; k < kDimensions; ++k) s[k] = static_cast<char>('0' + levels_[k]);
        return s;
    }

    friend constexpr bool operator==(const HealthState&, const HealthState&) = default;
    friend constexpr auto operator<=>(const HealthState&, const HealthState&) = default;

  private:
    Levels levels_;
};

struct PreferenceParams {
    std::array<double, kDimensions> u{};
    std::array<double, kDimensions> c{};
    double w = 0.0;
};

struct CutpointParams {
    std::array<double, kDimensions> t1{};
    std::array<double, kDimensions> t2{};
};

struct SurvivalRecord {
    int years_alive = 0;
    double mortality = 0.0;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    friend bool operator==(const Range&, const Range&) = default;
};

enum class BracketMode { qaly_unit, utility_tenths };
enum class CutpointScheme { per_subject, shared };

struct SimConfig {
    std::uint64_t n = 1'000'000;
    std::uint64_t seed = 20250905;
    int horizon = kHorizon;
    Range u_range{0.4, 0.9};
    Range c_range{0.3, 0.9};
    Range w_range{0.0, 0.4};
    double mort_coef = 0.01;
    BracketMode bracket_mode = BracketMode::qaly_unit;
    CutpointScheme cutpoint_scheme = CutpointScheme::per_subject;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

//---------------------------------------------------------------------------//
/*!
 * Health-state utility q(h) = (1 + w) * prod_k u_k^{c_k (h_k - 1)} - w.
 *
 * Evaluated as 1 - (1 + w)(1 - prod) so that full health returns exactly 1.
 */
inline double health_state_utility(const PreferenceParams& p, const HealthState& h) noexcept {
    double log_prod = 0.0;
    for (int k = 0; k < kDimensions; ++k) {
        const int steps = h.level(k) - 1;
        if (steps > 0) log_prod += p.c[k] * steps * std::log(p.u[k]);
    }
    if (log_prod == 0.0) return 1.0;
    return 1.0 - (1.0 + p.w) * -std::expm1(log_prod);
}

inline PreferenceParams sample_preferences(Stream& rng, const SimConfig& cfg = {}) noexcept {
    PreferenceParams p;
    for (auto& u : p.u) u = rng.uniform(cfg.u_range.lo, cfg.u_range.hi);
    for (auto& c : p.c) c = rng.uniform(cfg.c_range.lo, cfg.c_range.hi);
    p.w = rng.uniform(cfg.w_range.lo, cfg.w_range.hi);
    return p;
}

/// Ordered-probit cutpoints: t1 ~ U[0,1], t2 ~ U[t1, 2] per dimension.
inline CutpointParams sample_cutpoints(Stream& rng) noexcept {
    CutpointParams cp;
    for (int k = 0; k < kDimensions; ++k) {
        cp.t1[k] = rng.uniform(0.0, 1.0);
        cp.t2[k] = rng.uniform(cp.t1[k], 2.0);
    }
    return cp;
}

/// Maps a uniform draw to a level through the ordered-probit cutpoints.
inline int level_from_uniform(double v, double t1, double t2) noexcept {
    if (v < normal_cdf(t1)) return 1;
    if (v < normal_cdf(t2)) return 2;
    return 3;
}

inline HealthState sample_health_state(const CutpointParams& cp, Stream& rng) {
    HealthState::Levels levels{};
    for (int k = 0; k < kDimensions; ++k) {
        levels[k] = static_cast<std::uint8_t>(level_from_uniform(rng.uniform(), cp.t1[k], cp.t2[k]));
    }
    return HealthState(levels);
}

inline double mortality_probability(const HealthState& h, double mort_coef = 0.01) noexcept {
    return mort_coef * h.level_sum();
}

/*!
 * Survival over the horizon. One uniform per period is always drawn; the
 * subject dies in the first period t with draw < p and is counted alive for
 * the t - 1 periods before it.
 */
inline SurvivalRecord sample_survival(const HealthState& h, Stream& rng, double mort_coef = 0.01,
                                      int horizon = kHorizon) noexcept {
    SurvivalRecord rec;
    rec.mortality = mortality_probability(h, mort_coef);
    rec.years_alive = horizon;
    bool dead = false;
    for (int t = 1; t <= horizon; ++t) {
        const double v = rng.uniform();
        if (!dead && v < rec.mortality) {
            rec.years_alive = t - 1;
            dead = true;
        }
    }
    return rec;
}

/// Sum over t = 1..horizon of (1 - p)^t.
inline double expected_years_alive(double p, int horizon = kHorizon) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("mortality probability must lie in (0, 1)");
    double total = 0.0;
    double s = 1.0;
    for (int t = 1; t <= horizon; ++t) {
        s *= 1.0 - p;
        total += s;
    }
    return total;
}

/// P(years alive = y) under constant per-period mortality p.
inline double years_alive_probability(int y, double p, int horizon = kHorizon) {
    if (y < 0 || y > horizon) return 0.0;
    if (y == horizon) return std::pow(1.0 - p, horizon);
    return p * std::pow(1.0 - p, y);
}

}  // namespace qalybound
