// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qalybound {

//---------------------------------------------------------------------------//
/*!
 * Finite distribution with strictly increasing support and positive
 * probabilities summing to one.
 *
 * The CDF is stored as running sums with the last entry pinned to exactly
 * one. Comparisons between distributions use these stored values without
 * tolerance, so continuous data should be quantized before comparison.
 */
class EmpiricalDistribution {
  public:
    EmpiricalDistribution(std::vector<double> support, std::vector<double> probs)
        : support_(std::move(support)), probs_(std::move(probs)) {
        if (support_.empty()) throw std::invalid_argument("distribution needs a nonempty support");
        if (support_.size() != probs_.size()) {
            throw std::invalid_argument("support and probability lengths differ");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < support_.size(); ++i) {
            if (!std::isfinite(support_[i])) throw std::invalid_argument("support must be finite");
            if (i > 0 && !(support_[i - 1] < support_[i])) {
                throw std::invalid_argument("support must be strictly increasing");
            }
            if (!(probs_[i] > 0.0)) throw std::invalid_argument("probabilities must be positive");
            total += probs_[i];
            cdf_.push_back(total);
        }
        if (std::abs(total - 1.0) > 1e-12) {
            throw std::invalid_argument("probabilities must sum to 1");
        }
        cdf_.back() = 1.0;
    }

    static EmpiricalDistribution point_mass(double x) { return {{x}, {1.0}}; }

    /// Equal-weight distribution of a sample; ties are merged.
    static EmpiricalDistribution from_sample(std::span<const double> sample) {
        if (sample.empty()) throw std::invalid_argument("distribution of an empty sample");
        std::vector<double> sorted(sample.begin(), sample.end());
        std::sort(sorted.begin(), sorted.end());
        std::vector<double> support;
        std::vector<double> probs;
        const double w = 1.0 / static_cast<double>(sorted.size());
        for (std::size_t i = 0; i < sorted.size();) {
            std::size_t j = i;
            while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
            support.push_back(sorted[i]);
            probs.push_back(static_cast<double>(j - i) * w);
            i = j;
        }
        double total = 0.0;
        for (double p : probs) total += p;
        for (double& p : probs) p /= total;
        return {std::move(support), std::move(probs)};
    }

    std::span<const double> support() const noexcept { return support_; }
    std::span<const double> probs() const noexcept { return probs_; }
    std::span<const double> cumulative() const noexcept { return cdf_; }
    std::size_t size() const noexcept { return support_.size(); }

    /// F(x) = P(X <= x).
    double cdf(double x) const noexcept {
        const auto it = std::upper_bound(support_.begin(), support_.end(), x);
        if (it == support_.begin()) return 0.0;
        return cdf_[static_cast<std::size_t>(it - support_.begin()) - 1];
    }

    /// min{x in support : F(x) >= alpha}.
    double quantile(double alpha) const {
        if (!(alpha > 0.0 && alpha <= 1.0)) {
            throw std::domain_error("quantile level must lie in (0, 1]");
        }
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), alpha);
        return support_[static_cast<std::size_t>(it - cdf_.begin())];
    }

    double mean() const noexcept {
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) m += support_[i] * probs_[i];
        return m;
    }

    /// Distribution of g(X) for strictly increasing g.
    template <class F>
    EmpiricalDistribution transformed(F&& g) const {
        std::vector<double> s;
        s.reserve(size());
        for (double x : support_) s.push_back(g(x));
        return {std::move(s), probs_};
    }

  private:
    std::vector<double> support_;
    std::vector<double> probs_;
    std::vector<double> cdf_;
};

inline double quantile_of(const EmpiricalDistribution& d, double alpha) { return d.quantile(alpha); }

/// Difference of marginal quantiles Q_alpha(A) - Q_alpha(B).
inline double delta_d(const EmpiricalDistribution& a, const EmpiricalDistribution& b, double alpha) {
    return a.quantile(alpha) - b.quantile(alpha);
}

namespace detail {
inline std::vector<double> merged_support(const EmpiricalDistribution& a,
                                          const EmpiricalDistribution& b) {
    std::vector<double> out;
    std::set_union(a.support().begin(), a.support().end(), b.support().begin(), b.support().end(),
                   std::back_inserter(out));
    return out;
}
}  // namespace detail

/// Cumulative levels of both distributions plus midpoints between
/// consecutive levels; quantile functions are constant between these.
inline std::vector<double> merged_probability_grid(const EmpiricalDistribution& a,
                                                   const EmpiricalDistribution& b) {
    std::vector<double> levels;
    std::set_union(a.cumulative().begin(), a.cumulative().end(), b.cumulative().begin(),
                   b.cumulative().end(), std::back_inserter(levels));
    std::vector<double> grid;
    double prev = 0.0;
    for (double p : levels) {
        if (p <= prev) continue;
        grid.push_back(0.5 * (prev + p));
        grid.push_back(p);
        prev = p;
    }
    return grid;
}

//---------------------------------------------------------------------------//
// First-order stochastic dominance

enum class Dominance { a_strict, b_strict, equal, incomparable };

inline std::string to_string(Dominance d) {
    switch (d) {
        case Dominance::a_strict: return "A-strict";
        case Dominance::b_strict: return "B-strict";
        case Dominance::equal: return "equal";
        case Dominance::incomparable: return "incomparable";
    }
    return "?";
}

/// True when F_A(x) <= F_B(x) at every point of the merged support.
inline bool weakly_dominates(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    for (double x : detail::merged_support(a, b)) {
        if (a.cdf(x) > b.cdf(x)) return false;
    }
    return true;
}

inline Dominance stochastic_dominance(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    const bool ab = weakly_dominates(a, b);
    const bool ba = weakly_dominates(b, a);
    if (ab && ba) return Dominance::equal;
    if (ab) return Dominance::a_strict;
    if (ba) return Dominance::b_strict;
    return Dominance::incomparable;
}

//---------------------------------------------------------------------------//
// Riskiness by single crossing

enum class CrossingKind { identical, dominance, single_crossing, multiple_crossing };

inline std::string to_string(CrossingKind k) {
    switch (k) {
        case CrossingKind::identical: return "identical";
        case CrossingKind::dominance: return "dominance";
        case CrossingKind::single_crossing: return "single-crossing";
        case CrossingKind::multiple_crossing: return "multiple-crossing";
    }
    return "?";
}

struct CrossingReport {
    CrossingKind kind = CrossingKind::identical;
    // Present only for single crossings.
    std::optional<double> u_star;  // first support point past the crossing
    std::optional<double> p_star;  // midpoint of [p_lo, p_hi]
    std::optional<double> u_lo;    // last support point before the crossing
    std::optional<double> p_lo;    // range of CDF levels shared at the crossing
    std::optional<double> p_hi;
    bool a_riskier = false;         // F_B crosses F_A from below
    int sign_changes = 0;
    std::string diagnostics;
};

/*!
 * Scans F_A - F_B over the merged support. Zero differences are skipped, so
 * isolated touches do not count as crossings. A single change of sign is a
 * single crossing; the distribution whose CDF is higher below the crossing
 * is the riskier one. A run of equal CDFs between the two signs is
 * accepted only when the shared level is constant along the run.
 */
inline CrossingReport single_crossing(const EmpiricalDistribution& a, const EmpiricalDistribution& b) {
    const auto xs = detail::merged_support(a, b);
    std::vector<double> fa, fb;
    std::vector<int> sign;
    for (double x : xs) {
        fa.push_back(a.cdf(x));
        fb.push_back(b.cdf(x));
        const double diff = fa.back() - fb.back();
        sign.push_back(diff > 0.0 ? 1 : diff < 0.0 ? -1 : 0);
    }

    CrossingReport r;
    int prev_sign = 0;
    std::size_t last_before = 0;
    std::size_t first_after = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (sign[i] == 0) continue;
        if (prev_sign != 0 && sign[i] != prev_sign) {
            ++r.sign_changes;
            first_after = i;
        }
        if (r.sign_changes == 0) last_before = i;
        prev_sign = sign[i];
    }

    if (prev_sign == 0) {
        r.kind = CrossingKind::identical;
        return r;
    }
    if (r.sign_changes == 0) {
        r.kind = CrossingKind::dominance;
        r.diagnostics = prev_sign < 0 ? "A dominates B" : "B dominates A";
        return r;
    }
    if (r.sign_changes > 1) {
        r.kind = CrossingKind::multiple_crossing;
        r.diagnostics = std::to_string(r.sign_changes) + " sign changes";
        return r;
    }

    const std::size_t i = last_before;
    const std::size_t j = first_after;
    for (std::size_t k = i + 1; k + 1 < j; ++k) {
        if (fa[k] != fa[k + 1]) {
            r.kind = CrossingKind::multiple_crossing;
            r.diagnostics = "ambiguous plateau: CDFs coincide at several levels between " +
                            std::to_string(xs[i]) + " and " + std::to_string(xs[j]);
            return r;
        }
    }
    // Levels at which the quantiles of A and B coincide across the crossing.
    const double plo = std::max(fa[i], fb[i]);
    const double phi = std::min(fa[j], fb[j]);
    r.kind = CrossingKind::single_crossing;
    r.a_riskier = sign[i] > 0;
    r.u_lo = xs[i];
    r.u_star = j == i + 1 ? xs[j] : xs[i + 1];
    r.p_lo = plo;
    r.p_hi = phi;
    r.p_star = 0.5 * (plo + phi);
    return r;
}

//---------------------------------------------------------------------------//
// Sequential (lexicographic) quantile maximization

struct SequentialVerdict {
    int preference = 0;                   // +1 prefers A, -1 prefers B, 0 indifferent
    std::optional<double> deciding_alpha;  // first alpha where quantiles differ
};

inline SequentialVerdict compare_sequential(const EmpiricalDistribution& a,
                                            const EmpiricalDistribution& b,
                                            std::span<const double> quantile_seq) {
    if (quantile_seq.empty()) throw std::invalid_argument("quantile sequence is empty");
    for (double alpha : quantile_seq) {
        const double qa = a.quantile(alpha);
        const double qb = b.quantile(alpha);
        if (qa != qb) return {qa > qb ? 1 : -1, alpha};
    }
    return {};
}

struct NamedDistribution {
    std::string name;
    EmpiricalDistribution dist;
};

struct RankedAction {
    std::string name;
    int rank = 0;  // 0 is best; tied actions share a rank
    std::vector<double> quantiles;
};

/// Orders actions lexicographically by their quantiles along quantile_seq.
inline std::vector<RankedAction> sequential_quantile_max(std::span<const NamedDistribution> actions,
                                                         std::span<const double> quantile_seq) {
    if (actions.size() < 2) throw std::invalid_argument("need at least two actions");
    if (quantile_seq.empty()) throw std::invalid_argument("quantile sequence is empty");
    std::vector<RankedAction> out;
    for (const auto& act : actions) {
        RankedAction r{act.name, 0, {}};
        for (double alpha : quantile_seq) r.quantiles.push_back(act.dist.quantile(alpha));
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedAction& x, const RankedAction& y) {
        return std::lexicographical_compare(y.quantiles.begin(), y.quantiles.end(),
                                            x.quantiles.begin(), x.quantiles.end());
    });
    for (std::size_t i = 1; i < out.size(); ++i) {
        out[i].rank = out[i].quantiles == out[i - 1].quantiles ? out[i - 1].rank : static_cast<int>(i);
    }
    return out;
}

}  // namespace qalybound
