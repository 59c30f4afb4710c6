// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <thread>
#include <vector>

#include "qalybound/popmodel.hpp"
#include "qalybound/rng.hpp"
#include "qalybound/ttolab.hpp"

namespace qalybound {

struct Dataset {
    std::vector<Observation> observations;
    bool has_oracle = false;
};

namespace detail {
inline Observation observe(std::uint64_t id, const HealthState& state, const SimConfig& cfg) {
    Stream pref_rng(cfg.seed, id, Purpose::preferences);
    Stream surv_rng(cfg.seed, id, Purpose::survival);
    const auto prefs = sample_preferences(pref_rng, cfg);
    const auto surv = sample_survival(state, surv_rng, cfg.mort_coef, cfg.horizon);
    const double q = health_state_utility(prefs, state);
    Observation o;
    o.id = id;
    o.state = state;
    o.years_alive = surv.years_alive;
    o.mortality = surv.mortality;
    o.interval = elicit_interval(state, q, surv.years_alive, cfg.bracket_mode);
    o.oracle_q = q;
    o.oracle_qaly = realized_qaly(q, surv.years_alive);
    return o;
}

template <class Fn>
void for_each_shard(std::size_t n, unsigned threads, Fn&& fn) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (threads == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t begin = std::min(n, t * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& th : pool) th.join();
}
}  // namespace detail

/*!
 * Simulates cfg.n subjects. Subject i draws preferences, cutpoints (its
 * own, or the population's under the shared scheme), health state and
 * survival from substreams keyed by (seed, i), so the output is identical
 * for any number of threads.
 */
inline Dataset simulate_population(const SimConfig& cfg, unsigned threads = 1) {
    Dataset ds;
    ds.has_oracle = true;
    ds.observations.resize(cfg.n);
    CutpointParams shared{};
    if (cfg.cutpoint_scheme == CutpointScheme::shared) {
        Stream rng(cfg.seed, kSharedSubject, Purpose::cutpoints);
        shared = sample_cutpoints(rng);
    }
    detail::for_each_shard(cfg.n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            CutpointParams cp = shared;
            if (cfg.cutpoint_scheme == CutpointScheme::per_subject) {
                Stream rng(cfg.seed, i, Purpose::cutpoints);
                cp = sample_cutpoints(rng);
            }
            Stream health_rng(cfg.seed, i, Purpose::health);
            const auto state = sample_health_state(cp, health_rng);
            ds.observations[i] = detail::observe(i, state, cfg);
        }
    });
    return ds;
}

/// n subjects all in the given state (draws conditional on h).
inline std::vector<Observation> simulate_state(const HealthState& state, std::size_t n,
                                               const SimConfig& cfg = {}, unsigned threads = 1) {
    std::vector<Observation> out(n);
    detail::for_each_shard(n, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) out[i] = detail::observe(i, state, cfg);
    });
    return out;
}

inline std::size_t distinct_states(std::span<const Observation> observations) {
    std::vector<bool> seen(kStateCount, false);
    std::size_t count = 0;
    for (const auto& o : observations) {
        const auto idx = static_cast<std::size_t>(o.state.index());
        if (!seen[idx]) {
            seen[idx] = true;
            ++count;
        }
    }
    return count;
}

}  // namespace qalybound
