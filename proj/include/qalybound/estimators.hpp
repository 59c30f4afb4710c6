// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qalybound/errors.hpp"
#include "qalybound/normal.hpp"
#include "qalybound/popmodel.hpp"
#include "qalybound/rng.hpp"
#include "qalybound/ttolab.hpp"

namespace qalybound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Outcome vector with design matrix (first column is the intercept).
struct RegressionData {
    Matrix x;
    Vector y;
    std::vector<std::string> names;

    Eigen::Index rows() const noexcept { return x.rows(); }
    Eigen::Index cols() const noexcept { return x.cols(); }
};

//---------------------------------------------------------------------------//
// Design coding

inline constexpr int kDummyCount = 2 * kDimensions;

/// Intercept, then (level-2, level-3) indicators for each dimension, then extras.
inline Vector encode_design(const HealthState& state, std::span<const double> extras = {}) {
    Vector x = Vector::Zero(1 + kDummyCount + static_cast<Eigen::Index>(extras.size()));
    x(0) = 1.0;
    for (int k = 0; k < kDimensions; ++k) {
        const int level = state.level(k);
        if (level > 1) x(1 + 2 * k + (level - 2)) = 1.0;
    }
    for (std::size_t i = 0; i < extras.size(); ++i) {
        x(1 + kDummyCount + static_cast<Eigen::Index>(i)) = extras[i];
    }
    return x;
}

inline std::vector<std::string> design_names(std::size_t extras = 0) {
    std::vector<std::string> names{"intercept"};
    for (int k = 1; k <= kDimensions; ++k) {
        names.push_back("dim" + std::to_string(k) + "_level2");
        names.push_back("dim" + std::to_string(k) + "_level3");
    }
    for (std::size_t i = 0; i < extras; ++i) names.push_back("extra" + std::to_string(i + 1));
    return names;
}

//---------------------------------------------------------------------------//
// Interval collapsing

enum class CollapseMode { midpoint, lower, upper };

/// Point values standing in for intervals. Always an approximation unless
/// every interval was exact.
struct CollapsedData {
    std::vector<double> values;
    bool approximate = true;
};

inline double collapse(const QalyInterval& iv, CollapseMode mode) noexcept {
    if (iv.exact) return iv.lo;
    switch (mode) {
        case CollapseMode::lower: return iv.lo;
        case CollapseMode::upper: return iv.hi;
        case CollapseMode::midpoint: break;
    }
    return 0.5 * (iv.lo + iv.hi);
}

inline CollapsedData collapse_intervals(std::span<const Observation> observations, CollapseMode mode) {
    CollapsedData out;
    out.values.reserve(observations.size());
    out.approximate = false;
    for (const auto& o : observations) {
        out.values.push_back(collapse(o.interval, mode));
        out.approximate = out.approximate || !o.interval.exact;
    }
    return out;
}

/// Dummy-coded regression data on collapsed interval outcomes.
inline RegressionData collapsed_regression_data(std::span<const Observation> observations,
                                                CollapseMode mode) {
    RegressionData data;
    const auto n = static_cast<Eigen::Index>(observations.size());
    data.x.resize(n, 1 + kDummyCount);
    data.y.resize(n);
    data.names = design_names();
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& o = observations[static_cast<std::size_t>(i)];
        data.x.row(i) = encode_design(o.state).transpose();
        data.y(i) = collapse(o.interval, mode);
    }
    return data;
}

//---------------------------------------------------------------------------//
// Least squares helpers

namespace detail {
inline Eigen::Index design_rank(const Matrix& x) {
    Eigen::ColPivHouseholderQR<Matrix> qr(x);
    qr.setThreshold(1e-10);
    return qr.rank();
}

inline void check_design(const RegressionData& data) {
    if (data.x.rows() != data.y.size()) throw std::invalid_argument("design and outcome lengths differ");
    if (data.x.rows() < data.x.cols() + 2) {
        throw std::invalid_argument("need at least (number of covariates + 2) rows");
    }
    if (design_rank(data.x) < data.x.cols()) throw RankError("design matrix is rank deficient");
}

struct LeastSquares {
    Vector beta;
    double sigma = 0.0;
    Vector residuals;
};

// OLS on the rows selected by mask; sigma is the ML residual scale.
inline LeastSquares least_squares(const RegressionData& data, const std::vector<bool>& mask) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (mask[static_cast<std::size_t>(i)]) rows.push_back(i);
    }
    Matrix xs(static_cast<Eigen::Index>(rows.size()), data.cols());
    Vector ys(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        xs.row(static_cast<Eigen::Index>(r)) = data.x.row(rows[r]);
        ys(static_cast<Eigen::Index>(r)) = data.y(rows[r]);
    }
    LeastSquares ls;
    Eigen::ColPivHouseholderQR<Matrix> qr(xs);
    if (qr.rank() < xs.cols()) {
        // Interior rows alone may miss a category; fall back to all rows.
        qr.compute(data.x);
        ls.beta = qr.solve(data.y);
    } else {
        ls.beta = qr.solve(ys);
    }
    ls.residuals = ys - xs * ls.beta;
    const double ss = ls.residuals.squaredNorm();
    ls.sigma = rows.empty() ? 1.0 : std::sqrt(ss / static_cast<double>(rows.size()));
    if (!(ls.sigma > 0.0)) ls.sigma = 1e-3;
    return ls;
}
}  // namespace detail

//---------------------------------------------------------------------------//
// Tobit

struct TobitSpec {
    double lower = -0.4;
    double upper = 1.0;
    bool treat_upper_as_censoring = true;
};

struct TobitOptions {
    int max_iterations = 200;
    double gradient_tolerance = 1e-8;
    double relative_tolerance = 1e-12;
};

struct TobitFit {
    Vector b;
    double sigma = 0.0;
    double log_lik = 0.0;
    bool converged = false;
    Vector std_errs;
    double sigma_se = 0.0;
    int iterations = 0;
    std::size_t lower_censored = 0;
    std::size_t upper_censored = 0;
    Matrix covariance;  // of (b, sigma)
};

enum class CensorSide { interior, lower, upper };

inline CensorSide censor_side(double q, const TobitSpec& spec) noexcept {
    if (q <= spec.lower) return CensorSide::lower;
    if (spec.treat_upper_as_censoring && q >= spec.upper) return CensorSide::upper;
    return CensorSide::interior;
}

namespace detail {
inline void check_tobit_inputs(const RegressionData& data, const TobitSpec& spec) {
    if (!(spec.lower < spec.upper)) throw std::invalid_argument("Tobit limits need lower < upper");
    for (Eigen::Index i = 0; i < data.y.size(); ++i) {
        const double q = data.y(i);
        if (!(q >= spec.lower && q <= spec.upper)) {
            throw std::invalid_argument("outcome at row " + std::to_string(i) +
                                        " lies outside [lower, upper]");
        }
    }
}

// Log-likelihood with score and Hessian in the (gamma, theta) = (b / sigma,
// 1 / sigma) parametrization, where it is globally concave.
struct OlsenEval {
    double log_lik = 0.0;
    Vector grad;
    Matrix hess;
};

inline OlsenEval tobit_olsen(const RegressionData& data, const Vector& gamma, double theta,
                             const TobitSpec& spec, bool with_hessian) {
    const Eigen::Index k = data.cols();
    OlsenEval ev;
    ev.grad = Vector::Zero(k + 1);
    if (with_hessian) ev.hess = Matrix::Zero(k + 1, k + 1);
    const Vector index = data.x * gamma;
    Vector g(k + 1);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double q = data.y(i);
        const auto xi = data.x.row(i).transpose();
        double dl = 0.0;   // derivative along the scalar argument
        double d2l = 0.0;  // second derivative along it
        switch (censor_side(q, spec)) {
            case CensorSide::lower: {
                const double a = theta * spec.lower - index(i);
                const double lam = mills_ratio(a);
                ev.log_lik += log_normal_cdf(a);
                dl = lam;
                d2l = -lam * (a + lam);
                g.head(k) = -xi;
                g(k) = spec.lower;
                break;
            }
            case CensorSide::upper: {
                const double c = index(i) - theta * spec.upper;
                const double lam = mills_ratio(c);
                ev.log_lik += log_normal_cdf(c);
                dl = lam;
                d2l = -lam * (c + lam);
                g.head(k) = xi;
                g(k) = -spec.upper;
                break;
            }
            case CensorSide::interior: {
                const double e = theta * q - index(i);
                ev.log_lik += std::log(theta) + log_normal_pdf(e);
                dl = -e;
                d2l = -1.0;
                g.head(k) = -xi;
                g(k) = q;
                ev.grad(k) += 1.0 / theta;
                if (with_hessian) ev.hess(k, k) -= 1.0 / (theta * theta);
                break;
            }
        }
        ev.grad.noalias() += dl * g;
        if (with_hessian) ev.hess.noalias() += d2l * g * g.transpose();
    }
    return ev;
}
}  // namespace detail

/// Doubly-censored normal log-likelihood at (b, sigma).
inline double tobit_loglik(const RegressionData& data, const Vector& b, double sigma,
                           const TobitSpec& spec) {
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
    detail::check_tobit_inputs(data, spec);
    double ll = 0.0;
    const Vector xb = data.x * b;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const double q = data.y(i);
        switch (censor_side(q, spec)) {
            case CensorSide::lower: ll += log_normal_cdf((spec.lower - xb(i)) / sigma); break;
            case CensorSide::upper: ll += log_normal_cdf((xb(i) - spec.upper) / sigma); break;
            case CensorSide::interior:
                ll += log_normal_pdf((q - xb(i)) / sigma) - std::log(sigma);
                break;
        }
    }
    return ll;
}

/// Score of tobit_loglik with respect to (b, sigma); the last entry is d/dsigma.
inline Vector tobit_score(const RegressionData& data, const Vector& b, double sigma,
                          const TobitSpec& spec) {
    if (!(sigma > 0.0)) throw std::domain_error("sigma must be positive");
    detail::check_tobit_inputs(data, spec);
    const double theta = 1.0 / sigma;
    const Vector gamma = b * theta;
    const auto ev = detail::tobit_olsen(data, gamma, theta, spec, false);
    const Eigen::Index k = data.cols();
    Vector s(k + 1);
    s.head(k) = ev.grad.head(k) * theta;
    s(k) = -(ev.grad.head(k).dot(gamma) + theta * ev.grad(k)) * theta;
    return s;
}

/*!
 * Maximum-likelihood Tobit fit by damped Newton in the (b / sigma,
 * 1 / sigma) parametrization, started from least squares on interior rows.
 * Standard errors come from the observed information mapped back to
 * (b, sigma) by the delta method.
 */
inline TobitFit tobit_fit(const RegressionData& data, const TobitSpec& spec,
                          const TobitOptions& opts = {}) {
    detail::check_tobit_inputs(data, spec);
    detail::check_design(data);
    const Eigen::Index k = data.cols();

    TobitFit fit;
    std::vector<bool> interior(static_cast<std::size_t>(data.rows()));
    std::size_t n_interior = 0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
        const auto side = censor_side(data.y(i), spec);
        interior[static_cast<std::size_t>(i)] = side == CensorSide::interior;
        n_interior += side == CensorSide::interior;
        fit.lower_censored += side == CensorSide::lower;
        fit.upper_censored += side == CensorSide::upper;
    }
    if (n_interior == 0) {
        throw IdentificationError("all observations are censored; Tobit is not identified");
    }

    const auto ls = detail::least_squares(data, interior);
    double theta = 1.0 / ls.sigma;
    Vector gamma = ls.beta * theta;
    auto ev = detail::tobit_olsen(data, gamma, theta, spec, true);

    for (fit.iterations = 0; fit.iterations < opts.max_iterations; ++fit.iterations) {
        if (ev.grad.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
            fit.converged = true;
            break;
        }
        const Eigen::LDLT<Matrix> ldlt(-ev.hess);
        if (ldlt.info() != Eigen::Success) break;
        const Vector step = ldlt.solve(ev.grad);

        double scale = 1.0;
        bool accepted = false;
        detail::OlsenEval trial;
        for (int halving = 0; halving < 60; ++halving, scale *= 0.5) {
            const double t_theta = theta + scale * step(k);
            if (!(t_theta > 0.0)) continue;
            const Vector t_gamma = gamma + scale * step.head(k);
            trial = detail::tobit_olsen(data, t_gamma, t_theta, spec, true);
            if (std::isfinite(trial.log_lik) && trial.log_lik >= ev.log_lik) {
                gamma = t_gamma;
                theta = t_theta;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        const double change = std::abs(trial.log_lik - ev.log_lik);
        ev = std::move(trial);
        if (change <= opts.relative_tolerance * std::abs(ev.log_lik)) {
            ++fit.iterations;
            fit.converged = true;
            break;
        }
    }

    fit.b = gamma / theta;
    fit.sigma = 1.0 / theta;
    fit.log_lik = ev.log_lik;

    Matrix jac = Matrix::Zero(k + 1, k + 1);
    jac.topLeftCorner(k, k) = Matrix::Identity(k, k) / theta;
    jac.topRightCorner(k, 1) = -gamma / (theta * theta);
    jac(k, k) = -1.0 / (theta * theta);
    const Matrix info_inv = (-ev.hess).ldlt().solve(Matrix::Identity(k + 1, k + 1));
    fit.covariance = jac * info_inv * jac.transpose();
    fit.std_errs = fit.covariance.diagonal().head(k).cwiseSqrt();
    fit.sigma_se = std::sqrt(fit.covariance(k, k));
    return fit;
}

/// E(q | x) for the observed, doubly-censored outcome.
inline double tobit_observed_mean(double xb, double sigma, const TobitSpec& spec) {
    if (sigma < 0.0) throw std::domain_error("sigma must be nonnegative");
    if (sigma == 0.0) return std::clamp(xb, spec.lower, spec.upper);
    const double al = (spec.lower - xb) / sigma;
    const double au = (spec.upper - xb) / sigma;
    const double pl = normal_cdf(al);
    const double pu = normal_cdf(au);
    const double m = spec.lower * pl + spec.upper * (1.0 - pu) + xb * (pu - pl) +
                     sigma * (normal_pdf(al) - normal_pdf(au));
    return std::clamp(m, spec.lower, spec.upper);
}

/// Quantile of the latent N(xb, sigma^2), clamped to [lower, upper].
inline double tobit_observed_quantile(double xb, double sigma, double alpha, const TobitSpec& spec) {
    return std::clamp(xb + sigma * normal_quantile(alpha), spec.lower, spec.upper);
}

//---------------------------------------------------------------------------//
// Censored quantile regression

struct CqrSpec {
    double lower = -0.4;
    double upper = 1.0;
    int starts = 20;
    std::uint64_t seed = 1;
    double tolerance = 1e-8;
    int max_evaluations = 100000;
};

struct CqrStart {
    int index = 0;
    Vector start;
    Vector beta;
    double objective = 0.0;
    int evaluations = 0;
};

struct CqrFit {
    double alpha = 0.5;
    Vector beta;
    double objective = 0.0;
    int best_start = 0;
    std::vector<CqrStart> starts;
    std::size_t lower_active = 0;
    std::size_t upper_active = 0;
    bool non_identified = false;
};

inline double check_loss(double e, double alpha) noexcept { return e * (alpha - (e < 0.0 ? 1.0 : 0.0)); }

/*!
 * Powell's objective sum_i rho_alpha(q_i - clamp(x_i beta, lower, upper)).
 *
 * Rows sharing a design vector are pooled: the fitted value is common to
 * the pool, so its check loss follows from sorted outcomes and prefix sums
 * in logarithmic time. Designs built from categorical dummies have few
 * distinct rows, which makes each evaluation independent of n.
 */
class CqrObjective {
  public:
    CqrObjective(const RegressionData& data, double alpha, double lower, double upper)
        : alpha_(alpha), lower_(lower), upper_(upper), data_(&data) {
        std::map<std::vector<double>, std::vector<double>> pools;
        for (Eigen::Index i = 0; i < data.rows(); ++i) {
            std::vector<double> key(static_cast<std::size_t>(data.cols()));
            for (Eigen::Index j = 0; j < data.cols(); ++j) key[static_cast<std::size_t>(j)] = data.x(i, j);
            pools[std::move(key)].push_back(data.y(i));
            if (pools.size() > static_cast<std::size_t>(data.rows()) / 4 + 16) break;
        }
        pooled_ = pools.size() <= static_cast<std::size_t>(data.rows()) / 4 + 16;
        if (!pooled_) return;
        group_x_.resize(static_cast<Eigen::Index>(pools.size()), data.cols());
        Eigen::Index g = 0;
        for (auto& [key, ys] : pools) {
            for (Eigen::Index j = 0; j < data.cols(); ++j) group_x_(g, j) = key[static_cast<std::size_t>(j)];
            std::sort(ys.begin(), ys.end());
            std::vector<double> prefix(ys.size() + 1, 0.0);
            for (std::size_t i = 0; i < ys.size(); ++i) prefix[i + 1] = prefix[i] + ys[i];
            sorted_.push_back(std::move(ys));
            prefix_.push_back(std::move(prefix));
            ++g;
        }
    }

    double operator()(const Vector& beta) const {
        ++evaluations_;
        if (!pooled_) {
            const Vector fitted = data_->x * beta;
            double total = 0.0;
            for (Eigen::Index i = 0; i < fitted.size(); ++i) {
                total += check_loss(data_->y(i) - std::clamp(fitted(i), lower_, upper_), alpha_);
            }
            return total;
        }
        const Vector fitted = group_x_ * beta;
        double total = 0.0;
        for (std::size_t g = 0; g < sorted_.size(); ++g) {
            const double m = std::clamp(fitted(static_cast<Eigen::Index>(g)), lower_, upper_);
            const auto& ys = sorted_[g];
            const auto& pre = prefix_[g];
            const auto below = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), m) - ys.begin());
            const double n_below = static_cast<double>(below);
            const double n_above = static_cast<double>(ys.size() - below);
            const double sum_below = pre[below];
            const double sum_above = pre.back() - sum_below;
            total += alpha_ * (sum_above - n_above * m) + (1.0 - alpha_) * (n_below * m - sum_below);
        }
        return total;
    }

    bool pooled() const noexcept { return pooled_; }
    int evaluations() const noexcept { return evaluations_; }
    void reset_evaluations() noexcept { evaluations_ = 0; }

  private:
    double alpha_;
    double lower_;
    double upper_;
    const RegressionData* data_;
    bool pooled_ = false;
    Matrix group_x_;
    std::vector<std::vector<double>> sorted_;
    std::vector<std::vector<double>> prefix_;
    mutable int evaluations_ = 0;
};

inline double cqr_objective(const RegressionData& data, const Vector& beta, double alpha,
                            double lower, double upper) {
    double total = 0.0;
    const Vector fitted = data.x * beta;
    for (Eigen::Index i = 0; i < fitted.size(); ++i) {
        total += check_loss(data.y(i) - std::clamp(fitted(i), lower, upper), alpha);
    }
    return total;
}

namespace detail {
// Pattern search polling +-scale_i e_i and random directions, expanding on
// success and halving the step when a full poll fails.
inline Vector pattern_search(const CqrObjective& f, Vector x, const Vector& scale, Stream& rng,
                             double tolerance, int max_evaluations, double& fx) {
    const Eigen::Index k = x.size();
    fx = f(x);
    double step = 1.0;
    const int random_dirs = static_cast<int>(2 * k);
    Vector dir(k);
    while (step > tolerance && f.evaluations() < max_evaluations) {
        bool improved = false;
        for (int d = 0; d < 2 * k + random_dirs; ++d) {
            if (d < 2 * k) {
                dir.setZero();
                dir(d / 2) = d % 2 == 0 ? 1.0 : -1.0;
            } else {
                for (Eigen::Index j = 0; j < k; ++j) dir(j) = normal_quantile(rng.uniform_open());
                dir /= dir.norm();
            }
            Vector trial = x + step * scale.cwiseProduct(dir);
            double ft = f(trial);
            if (ft < fx) {
                // Expand along a successful direction.
                double s = step;
                while (f.evaluations() < max_evaluations) {
                    s *= 2.0;
                    const Vector further = x + s * scale.cwiseProduct(dir);
                    const double ff = f(further);
                    if (!(ff < ft)) break;
                    trial = further;
                    ft = ff;
                }
                x = trial;
                fx = ft;
                improved = true;
            }
        }
        if (!improved) step *= 0.5;
    }
    return x;
}
}  // namespace detail

/*!
 * Powell censored quantile regression by multistart pattern search.
 *
 * Start 0 is least squares on interior rows with the intercept shifted to
 * the alpha-quantile of its residuals; the other starts perturb that point.
 * The best objective wins, ties going to the lowest start index.
 */
inline CqrFit cqr_fit(const RegressionData& data, double alpha, const CqrSpec& spec = {}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0, 1)");
    if (!(spec.lower < spec.upper)) throw std::invalid_argument("CQR limits need lower < upper");
    detail::check_design(data);
    const Eigen::Index k = data.cols();
    const auto n = static_cast<std::size_t>(data.rows());

    std::vector<bool> interior(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double q = data.y(static_cast<Eigen::Index>(i));
        interior[i] = q > spec.lower && q < spec.upper;
    }
    if (std::none_of(interior.begin(), interior.end(), [](bool b) { return b; })) {
        interior.assign(n, true);
    }
    const auto ls = detail::least_squares(data, interior);
    std::vector<double> resid(ls.residuals.data(), ls.residuals.data() + ls.residuals.size());
    std::sort(resid.begin(), resid.end());
    auto resid_quantile = [&](double a) {
        if (resid.empty()) return 0.0;
        const auto idx = static_cast<std::size_t>(std::clamp(a, 0.0, 1.0) * static_cast<double>(resid.size() - 1));
        return resid[idx];
    };

    Vector scale(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        const double sd = j == 0 ? 1.0 : std::sqrt((data.x.col(j).array() - data.x.col(j).mean()).square().mean());
        scale(j) = ls.sigma / std::max(sd, 1e-3);
    }

    Vector base = ls.beta;
    base(0) += resid_quantile(alpha);

    CqrObjective objective(data, alpha, spec.lower, spec.upper);
    Stream rng(spec.seed, 0, Purpose::optimizer);
    CqrFit fit;
    fit.alpha = alpha;
    fit.objective = std::numeric_limits<double>::infinity();
    for (int s = 0; s < std::max(1, spec.starts); ++s) {
        CqrStart st;
        st.index = s;
        st.start = base;
        if (s > 0) {
            st.start(0) = ls.beta(0) + resid_quantile(alpha + rng.uniform(-0.2, 0.2));
            for (Eigen::Index j = 0; j < k; ++j) {
                st.start(j) += 0.5 * scale(j) * normal_quantile(rng.uniform_open());
            }
        }
        objective.reset_evaluations();
        st.beta = detail::pattern_search(objective, st.start, scale, rng, spec.tolerance,
                                         spec.max_evaluations, st.objective);
        st.evaluations = objective.evaluations();
        if (st.objective < fit.objective) {
            fit.objective = st.objective;
            fit.beta = st.beta;
            fit.best_start = s;
        }
        fit.starts.push_back(std::move(st));
    }

    const Vector fitted = data.x * fit.beta;
    for (Eigen::Index i = 0; i < fitted.size(); ++i) {
        fit.lower_active += fitted(i) <= spec.lower;
        fit.upper_active += fitted(i) >= spec.upper;
    }
    const double nd = static_cast<double>(n);
    fit.non_identified = static_cast<double>(fit.upper_active) >= (1.0 - alpha) * nd ||
                         static_cast<double>(fit.lower_active) >= alpha * nd;
    return fit;
}

//---------------------------------------------------------------------------//
// Synthetic censored data

enum class Dgp { homoskedastic_normal, heteroskedastic_normal, skewed };
enum class DesignKind { eq5d_dummies, continuous };

struct DgpSpec {
    Dgp dgp = Dgp::homoskedastic_normal;
    DesignKind design = DesignKind::eq5d_dummies;
    Vector beta;                 // length matches the design
    double sigma = 1.0;
    double lower = -0.4;
    double upper = 1.0;
    bool censor_upper = true;
    int continuous_covariates = 1;
    double hetero_slope = 1.0;   // sd multiplier 1 + slope * |x_1|
    int skew_df = 2;             // chi-square degrees of freedom
};

struct SyntheticData {
    RegressionData data;
    Vector latent;
    std::size_t lower_censored = 0;
    std::size_t upper_censored = 0;
};

inline Eigen::Index dgp_columns(const DgpSpec& spec) {
    return spec.design == DesignKind::eq5d_dummies ? 1 + kDummyCount : 1 + spec.continuous_covariates;
}

/*!
 * Draws q* = x beta + error and censors it to [lower, upper] (upper only
 * when censor_upper). Skewed errors are chi-square shifted and scaled to
 * mean zero and variance sigma^2.
 */
inline SyntheticData synth_censored_data(const DgpSpec& spec, std::size_t n, std::uint64_t seed) {
    const Eigen::Index k = dgp_columns(spec);
    if (spec.beta.size() != k) throw std::invalid_argument("DGP beta length does not match its design");
    if (!(spec.sigma > 0.0)) throw std::invalid_argument("DGP sigma must be positive");
    SyntheticData out;
    auto& d = out.data;
    const auto rows = static_cast<Eigen::Index>(n);
    d.x.resize(rows, k);
    d.y.resize(rows);
    out.latent.resize(rows);
    if (spec.design == DesignKind::eq5d_dummies) {
        d.names = design_names();
    } else {
        d.names = {"intercept"};
        for (int j = 1; j <= spec.continuous_covariates; ++j) d.names.push_back("x" + std::to_string(j));
    }
    for (Eigen::Index i = 0; i < rows; ++i) {
        Stream rng(seed, static_cast<std::uint64_t>(i), Purpose::synthetic);
        if (spec.design == DesignKind::eq5d_dummies) {
            HealthState::Levels levels{};
            for (auto& l : levels) l = static_cast<std::uint8_t>(1 + (rng.next() >> 32) % 3);
            d.x.row(i) = encode_design(HealthState(levels)).transpose();
        } else {
            d.x(i, 0) = 1.0;
            for (Eigen::Index j = 1; j < k; ++j) d.x(i, j) = normal_quantile(rng.uniform_open());
        }
        double err = 0.0;
        switch (spec.dgp) {
            case Dgp::homoskedastic_normal:
                err = spec.sigma * normal_quantile(rng.uniform_open());
                break;
            case Dgp::heteroskedastic_normal: {
                const double x1 = k > 1 ? std::abs(d.x(i, 1)) : 0.0;
                err = spec.sigma * (1.0 + spec.hetero_slope * x1) * normal_quantile(rng.uniform_open());
                break;
            }
            case Dgp::skewed: {
                double chi2 = 0.0;
                for (int j = 0; j < spec.skew_df; ++j) {
                    const double z = normal_quantile(rng.uniform_open());
                    chi2 += z * z;
                }
                err = spec.sigma * (chi2 - spec.skew_df) / std::sqrt(2.0 * spec.skew_df);
                break;
            }
        }
        const double latent = d.x.row(i).dot(spec.beta) + err;
        out.latent(i) = latent;
        double q = latent;
        if (q <= spec.lower) {
            q = spec.lower;
            ++out.lower_censored;
        } else if (spec.censor_upper && q >= spec.upper) {
            q = spec.upper;
            ++out.upper_censored;
        }
        d.y(i) = q;
    }
    return out;
}

}  // namespace qalybound
