// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qalybound/ttolab.hpp"

namespace qalybound {

enum class StatKind { mean, quantile, cdf };

/// Lower/upper pair bounding a mean, an alpha-quantile, or a CDF value.
struct BoundedStat {
    double lo = 0.0;
    double hi = 0.0;
    StatKind kind = StatKind::mean;
    double param = 0.0;  // alpha for quantiles, threshold for CDFs

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo <= x && x <= hi; }
};

namespace detail {
inline void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) {
        throw std::domain_error("quantile level must lie in (0, 1]");
    }
}

// 1-based rank ceil(alpha * n). The slack absorbs representation error in
// alpha (0.7 * 10 evaluates to 7.000000000000001).
inline std::size_t quantile_rank(double alpha, std::size_t n) {
    const double target = alpha * static_cast<double>(n);
    auto k = static_cast<std::size_t>(std::ceil(target - 1e-9 * std::max(1.0, target)));
    return std::clamp<std::size_t>(k, 1, n);
}
}  // namespace detail

/// Q_alpha = min{x : F(x) >= alpha} on an ascending sample.
inline double sorted_quantile(std::span<const double> sorted, double alpha) {
    if (sorted.empty()) throw std::invalid_argument("quantile of an empty sample");
    detail::check_alpha(alpha);
    return sorted[detail::quantile_rank(alpha, sorted.size()) - 1];
}

/// The ceil(alpha N)-th order statistic.
inline double empirical_quantile(std::span<const double> sample, double alpha) {
    if (sample.empty()) throw std::invalid_argument("quantile of an empty sample");
    detail::check_alpha(alpha);
    std::vector<double> work(sample.begin(), sample.end());
    const auto k = detail::quantile_rank(alpha, work.size()) - 1;
    std::nth_element(work.begin(), work.begin() + static_cast<std::ptrdiff_t>(k), work.end());
    return work[k];
}

//---------------------------------------------------------------------------//
/*!
 * Interval-valued sample with sorted endpoint vectors.
 *
 * Quantiles and CDF values are monotone under pointwise ordering of the
 * data, so evaluating them on the lower and upper endpoints gives sharp
 * bounds over every selection from the intervals.
 */
class IntervalSample {
  public:
    explicit IntervalSample(std::span<const QalyInterval> intervals) {
        if (intervals.empty()) throw std::invalid_argument("interval sample is empty");
        lo_.reserve(intervals.size());
        hi_.reserve(intervals.size());
        for (const auto& iv : intervals) {
            if (!(iv.lo <= iv.hi)) throw std::invalid_argument("interval with lo > hi");
            lo_.push_back(iv.lo);
            hi_.push_back(iv.hi);
        }
        lo_sum_ = std::accumulate(lo_.begin(), lo_.end(), 0.0);
        hi_sum_ = std::accumulate(hi_.begin(), hi_.end(), 0.0);
        std::sort(lo_.begin(), lo_.end());
        std::sort(hi_.begin(), hi_.end());
    }

    std::size_t size() const noexcept { return lo_.size(); }

    BoundedStat quantile(double alpha) const {
        return {sorted_quantile(lo_, alpha), sorted_quantile(hi_, alpha), StatKind::quantile, alpha};
    }

    BoundedStat mean() const {
        const auto n = static_cast<double>(size());
        return {lo_sum_ / n, hi_sum_ / n, StatKind::mean, 0.0};
    }

    /// P(X <= c) lies between the share of upper endpoints <= c and the
    /// share of lower endpoints <= c.
    BoundedStat cdf(double c) const {
        return {share_at_or_below(hi_, c), share_at_or_below(lo_, c), StatKind::cdf, c};
    }

  private:
    double share_at_or_below(const std::vector<double>& sorted, double c) const {
        const auto k = std::upper_bound(sorted.begin(), sorted.end(), c) - sorted.begin();
        return static_cast<double>(k) / static_cast<double>(sorted.size());
    }

    std::vector<double> lo_;
    std::vector<double> hi_;
    double lo_sum_ = 0.0;
    double hi_sum_ = 0.0;
};

inline BoundedStat bound_quantile(std::span<const QalyInterval> intervals, double alpha) {
    detail::check_alpha(alpha);
    return IntervalSample(intervals).quantile(alpha);
}

inline BoundedStat bound_mean(std::span<const QalyInterval> intervals) {
    return IntervalSample(intervals).mean();
}

inline BoundedStat bound_cdf(std::span<const QalyInterval> intervals, double threshold) {
    return IntervalSample(intervals).cdf(threshold);
}

//---------------------------------------------------------------------------//
// Placement of Q_alpha among the T + 1 utility intervals

struct QuantileClass {
    enum class Kind { below_zero, bracket, ceiling };
    Kind kind = Kind::bracket;
    int d = 0;  // bracket (d - 1, d); for ceiling the point d = T

    double lo() const noexcept {
        return kind == Kind::below_zero ? -INFINITY : kind == Kind::ceiling ? d : d - 1;
    }
    double hi() const noexcept { return kind == Kind::below_zero ? 0.0 : d; }

    std::string label() const {
        switch (kind) {
            case Kind::below_zero: return "below 0";
            case Kind::ceiling: return "point " + std::to_string(d);
            case Kind::bracket: break;
        }
        return "(" + std::to_string(d - 1) + ", " + std::to_string(d) + ")";
    }

    friend bool operator==(const QuantileClass&, const QuantileClass&) = default;
};

/*!
 * Places Q_alpha given probs[d] = P[u < d] for d = 0..T.
 *
 * Returns below-zero when P_0 >= alpha, the bracket (d - 1, d) for the d
 * with P_{d-1} < alpha <= P_d, and the ceiling point T when P_T < alpha.
 */
inline QuantileClass classify_quantile_interval(std::span<const double> probs, double alpha) {
    detail::check_alpha(alpha);
    if (probs.size() < 2) throw std::invalid_argument("need P[u < d] for d = 0..T");
    for (std::size_t d = 0; d < probs.size(); ++d) {
        if (!(probs[d] >= 0.0 && probs[d] <= 1.0)) {
            throw std::invalid_argument("probabilities must lie in [0, 1]");
        }
        if (d > 0 && probs[d] < probs[d - 1]) {
            throw std::invalid_argument("P[u < d] must be nondecreasing in d");
        }
    }
    using Kind = QuantileClass::Kind;
    if (probs[0] >= alpha) return {Kind::below_zero, 0};
    for (std::size_t d = 1; d < probs.size(); ++d) {
        if (probs[d] >= alpha) return {Kind::bracket, static_cast<int>(d)};
    }
    return {Kind::ceiling, static_cast<int>(probs.size()) - 1};
}

/// Empirical P[u < d], d = 0..horizon, counting an observation only when
/// its interval places it below d (point values strictly, brackets via hi).
inline std::vector<double> prob_known_below(std::span<const QalyInterval> intervals,
                                            int horizon = kHorizon) {
    if (intervals.empty()) throw std::invalid_argument("interval sample is empty");
    std::vector<double> probs(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (int d = 0; d <= horizon; ++d) {
        std::size_t count = 0;
        for (const auto& iv : intervals) {
            if (iv.exact ? iv.lo < d : iv.hi <= d) ++count;
        }
        probs[d] = static_cast<double>(count) / static_cast<double>(intervals.size());
    }
    return probs;
}

/// Empirical P[u <= d], the companion used to detect atoms at integers.
inline std::vector<double> prob_known_at_or_below(std::span<const QalyInterval> intervals,
                                                  int horizon = kHorizon) {
    if (intervals.empty()) throw std::invalid_argument("interval sample is empty");
    std::vector<double> probs(static_cast<std::size_t>(horizon) + 1, 0.0);
    for (int d = 0; d <= horizon; ++d) {
        std::size_t count = 0;
        for (const auto& iv : intervals) {
            if (iv.hi <= d) ++count;
        }
        probs[d] = static_cast<double>(count) / static_cast<double>(intervals.size());
    }
    return probs;
}

//---------------------------------------------------------------------------//
// Grouped summaries

struct StateSummary {
    HealthState state;
    std::size_t n = 0;
    std::vector<BoundedStat> quantile_bounds;  // one per requested alpha
    BoundedStat mean_bound;
    bool below_min_count = false;

    const BoundedStat& quantile(double alpha) const {
        for (const auto& b : quantile_bounds) {
            if (b.param == alpha) return b;
        }
        throw std::out_of_range("alpha not summarized");
    }
};

inline const std::vector<double>& default_alphas() {
    static const std::vector<double> alphas{0.10, 0.25, 0.50, 0.75, 0.90};
    return alphas;
}

inline std::map<HealthState, std::vector<QalyInterval>> group_by_state(
    std::span<const Observation> observations) {
    std::map<HealthState, std::vector<QalyInterval>> groups;
    for (const auto& obs : observations) groups[obs.state].push_back(obs.interval);
    return groups;
}

/// Per-state quantile and mean bounds, most frequent state first (ties by code).
inline std::vector<StateSummary> summarize_by_state(std::span<const Observation> observations,
                                                    std::span<const double> alphas,
                                                    std::size_t min_count = 1) {
    if (observations.empty()) throw std::invalid_argument("cannot summarize an empty dataset");
    for (double a : alphas) detail::check_alpha(a);
    std::vector<StateSummary> out;
    for (const auto& [state, intervals] : group_by_state(observations)) {
        const IntervalSample sample(intervals);
        StateSummary s;
        s.state = state;
        s.n = sample.size();
        for (double a : alphas) s.quantile_bounds.push_back(sample.quantile(a));
        s.mean_bound = sample.mean();
        s.below_min_count = s.n < min_count;
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const StateSummary& a, const StateSummary& b) { return a.n > b.n; });
    return out;
}

//---------------------------------------------------------------------------//
// Policy comparison by differences of marginal statistics

struct PolicyComparison {
    std::vector<BoundedStat> quantile_differences;  // one per alpha
    BoundedStat mean_difference;
    BoundedStat mean_a;
    BoundedStat mean_b;
    std::vector<BoundedStat> quantiles_a;
    std::vector<BoundedStat> quantiles_b;
};

/// Interval difference [a.lo - b.hi, a.hi - b.lo].
inline BoundedStat bound_difference(const BoundedStat& a, const BoundedStat& b) {
    return {a.lo - b.hi, a.hi - b.lo, a.kind, a.param};
}

/*!
 * Bounds on Q_alpha(A) - Q_alpha(B) and E(A) - E(B) from the marginal
 * bounds of each policy. These are differences of marginal statistics, not
 * statistics of individual differences.
 */
inline PolicyComparison compare_policies(std::span<const QalyInterval> a,
                                         std::span<const QalyInterval> b,
                                         std::span<const double> alphas) {
    const IntervalSample sa(a);
    const IntervalSample sb(b);
    PolicyComparison out;
    for (double alpha : alphas) {
        out.quantiles_a.push_back(sa.quantile(alpha));
        out.quantiles_b.push_back(sb.quantile(alpha));
        out.quantile_differences.push_back(bound_difference(out.quantiles_a.back(), out.quantiles_b.back()));
    }
    out.mean_a = sa.mean();
    out.mean_b = sb.mean();
    out.mean_difference = bound_difference(out.mean_a, out.mean_b);
    return out;
}

inline std::vector<QalyInterval> intervals_of(std::span<const Observation> observations) {
    std::vector<QalyInterval> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.interval);
    return out;
}

}  // namespace qalybound
