// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
//
// qalybound command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qalybound/bounds.hpp"
#include "qalybound/config.hpp"
#include "qalybound/errors.hpp"
#include "qalybound/estimators.hpp"
#include "qalybound/io.hpp"
#include "qalybound/simulate.hpp"
#include "qalybound/welfare.hpp"

namespace qb = qalybound;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumerical = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Writes text to path, or stdout when path is empty or "-"; returns true when a file was written.
bool emit(const std::string& path, const std::string& text, qb::RunManifest& manifest) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return false;
    }
    qb::write_file(path, text);
    manifest.record_output(path);
    return true;
}

void finish(qb::RunManifest& manifest, const std::string& manifest_path, const std::string& primary_out) {
    if (manifest.output_checksums.empty()) return;
    manifest.finished_at = qb::utc_timestamp();
    manifest.write(manifest_path.empty() ? primary_out + ".manifest.json" : manifest_path);
}

std::string command_line(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += ' ';
        s += argv[i];
    }
    return s;
}

qb::CollapseMode collapse_mode(const std::string& s) {
    if (s == "midpoint") return qb::CollapseMode::midpoint;
    if (s == "lower") return qb::CollapseMode::lower;
    if (s == "upper") return qb::CollapseMode::upper;
    throw UsageError("--collapse must be one of {midpoint, lower, upper}");
}

std::vector<qb::Observation> select_state(const qb::Dataset& ds, const std::string& code) {
    if (code.empty()) return ds.observations;
    const auto state = qb::HealthState::from_code(code);
    std::vector<qb::Observation> out;
    for (const auto& o : ds.observations) {
        if (o.state == state) out.push_back(o);
    }
    if (out.empty()) throw qb::SchemaError("state " + code + " does not occur in the dataset");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval-measured QALY simulation, bounds and welfare comparisons"};
    app.require_subcommand(1);
    std::string manifest_path;
    app.add_option("--manifest", manifest_path, "Manifest path (default: <out>.manifest.json)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate a population and write the subjects file");
    std::string sim_config, sim_out;
    bool sim_oracle = false;
    unsigned sim_threads = 1;
    std::optional<std::size_t> sim_n;
    sim->add_option("--config", sim_config, "key=value configuration file");
    sim->add_option("--out", sim_out, "Subjects CSV")->required();
    sim->add_flag("--oracle", sim_oracle, "Include q_true and qaly_true columns");
    sim->add_option("--threads", sim_threads, "Worker threads")->check(CLI::Range(1u, 256u));
    sim->add_option("--n", sim_n, "Override the configured population size")->check(CLI::PositiveNumber);

    // table
    auto* tab = app.add_subcommand("table", "Per-state quantile and mean bounds");
    std::string tab_in, tab_out, tab_alphas = ".10,.25,.50,.75,.90";
    std::size_t tab_min = 1;
    tab->add_option("--in", tab_in, "Subjects CSV")->required();
    tab->add_option("--alphas", tab_alphas, "Comma-separated quantile levels");
    tab->add_option("--min-count", tab_min, "Flag states with fewer observations");
    tab->add_option("--out", tab_out, "Table CSV (stdout when omitted)");

    // cdf-bounds
    auto* cdf = app.add_subcommand("cdf-bounds", "Bounds on the QALY cdf over a threshold grid");
    std::string cdf_in, cdf_out, cdf_state, cdf_grid = "-4:10:0.25";
    cdf->add_option("--in", cdf_in, "Subjects CSV")->required();
    cdf->add_option("--state", cdf_state, "Condition on one health state");
    cdf->add_option("--grid", cdf_grid, "lo:hi:step");
    cdf->add_option("--out", cdf_out, "cdf CSV (stdout when omitted)");

    // compare
    auto* cmp = app.add_subcommand("compare", "Bounds on differences of marginal statistics");
    std::string cmp_a, cmp_b, cmp_out, cmp_alphas = ".10,.25,.50,.75,.90";
    cmp->add_option("--a", cmp_a, "Subjects CSV under policy A")->required();
    cmp->add_option("--b", cmp_b, "Subjects CSV under policy B")->required();
    cmp->add_option("--alphas", cmp_alphas, "Comma-separated quantile levels");
    cmp->add_option("--out", cmp_out, "Comparison CSV (stdout when omitted)");

    // fit
    auto* fit = app.add_subcommand("fit", "Censored regression on collapsed intervals");
    std::string fit_model, fit_in, fit_out, fit_collapse = "midpoint";
    double fit_alpha = 0.5, fit_lower = -4.0, fit_upper = 10.0;
    bool fit_allow = false, fit_upper_true = false;
    int fit_starts = 20;
    fit->add_option("model", fit_model, "tobit or cqr")->required()->check(CLI::IsMember({"tobit", "cqr"}));
    fit->add_option("--in", fit_in, "Subjects CSV")->required();
    fit->add_option("--collapse", fit_collapse, "midpoint, lower or upper");
    fit->add_option("--alpha", fit_alpha, "Quantile level for cqr");
    fit->add_option("--lower", fit_lower, "Censoring point L");
    fit->add_option("--upper", fit_upper, "Censoring point U");
    fit->add_flag("--upper-is-bound", fit_upper_true, "Treat U as a true bound rather than censoring (tobit)");
    fit->add_option("--starts", fit_starts, "Multistart count (cqr)")->check(CLI::PositiveNumber);
    fit->add_flag("--allow-nonconverged", fit_allow, "Report a fit that did not converge");
    fit->add_option("--out", fit_out, "Fit CSV (stdout when omitted)");

    // welfare
    auto* wel = app.add_subcommand("welfare", "Compare distributions read from value,prob files");
    std::string wel_kind, wel_a, wel_b, wel_out, wel_seq = ".50";
    std::vector<std::string> wel_more;
    wel->add_option("kind", wel_kind, "dominance, crossing or seqmax")
        ->required()
        ->check(CLI::IsMember({"dominance", "crossing", "seqmax"}));
    wel->add_option("--a", wel_a, "Distribution A")->required();
    wel->add_option("--b", wel_b, "Distribution B")->required();
    wel->add_option("--more", wel_more, "Further actions for seqmax");
    wel->add_option("--quantile-seq", wel_seq, "Quantile levels in lexicographic order");
    wel->add_option("--out", wel_out, "Result file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    qb::RunManifest manifest;
    manifest.command = command_line(argc, argv);
    manifest.started_at = qb::utc_timestamp();

    try {
        if (*sim) {
            auto cfg = sim_config.empty() ? qb::SimConfig{} : qb::parse_config(qb::read_file(sim_config));
            if (sim_n) cfg.n = *sim_n;
            const auto ds = qb::simulate_population(cfg, sim_threads);
            manifest.config = cfg;
            emit(sim_out, qb::format_dataset(ds, sim_oracle), manifest);
            finish(manifest, manifest_path, sim_out);
            std::fprintf(stderr, "simulated %zu subjects, %zu distinct states\n", ds.observations.size(),
                         qb::distinct_states(ds.observations));
        } else if (*tab) {
            const auto alphas = qb::parse_alpha_list(tab_alphas);
            const auto ds = qb::read_dataset(tab_in);
            const auto rows = qb::summarize_by_state(ds.observations, alphas, tab_min);
            emit(tab_out, qb::format_state_table(rows, alphas), manifest);
            finish(manifest, manifest_path, tab_out);
        } else if (*cdf) {
            const auto grid = qb::parse_grid(cdf_grid);
            const auto ds = qb::read_dataset(cdf_in);
            const auto obs = select_state(ds, cdf_state);
            const qb::IntervalSample sample(qb::intervals_of(obs));
            emit(cdf_out, qb::format_cdf_bounds(sample, grid), manifest);
            finish(manifest, manifest_path, cdf_out);
        } else if (*cmp) {
            const auto alphas = qb::parse_alpha_list(cmp_alphas);
            const auto a = qb::read_dataset(cmp_a);
            const auto b = qb::read_dataset(cmp_b);
            const auto res =
                qb::compare_policies(qb::intervals_of(a.observations), qb::intervals_of(b.observations), alphas);
            emit(cmp_out, qb::format_comparison(res, alphas), manifest);
            finish(manifest, manifest_path, cmp_out);
        } else if (*fit) {
            const auto ds = qb::read_dataset(fit_in);
            const auto data = qb::collapsed_regression_data(ds.observations, collapse_mode(fit_collapse));
            std::ostringstream os;
            os << "# outcome collapsed to " << fit_collapse << " points; an approximation of interval data\n";
            os << "name,estimate,se\n";
            if (fit_model == "tobit") {
                const qb::TobitSpec spec{fit_lower, fit_upper, !fit_upper_true};
                const auto f = qb::tobit_fit(data, spec);
                if (!f.converged && !fit_allow) {
                    throw NumericalError("tobit fit did not converge after " + std::to_string(f.iterations) +
                                         " iterations (use --allow-nonconverged to report it)");
                }
                for (Eigen::Index j = 0; j < f.b.size(); ++j) {
                    os << data.names[static_cast<std::size_t>(j)] << ',' << qb::format_double(f.b(j)) << ','
                       << qb::format_double(f.std_errs(j)) << '\n';
                }
                os << "sigma," << qb::format_double(f.sigma) << ',' << qb::format_double(f.sigma_se) << '\n';
                os << "log_lik," << qb::format_double(f.log_lik) << ",\n";
                os << "converged," << (f.converged ? 1 : 0) << ",\n";
                os << "iterations," << f.iterations << ",\n";
                os << "lower_censored," << f.lower_censored << ",\n";
                os << "upper_censored," << f.upper_censored << ",\n";
            } else {
                qb::CqrSpec spec;
                spec.lower = fit_lower;
                spec.upper = fit_upper;
                spec.starts = fit_starts;
                const auto f = qb::cqr_fit(data, fit_alpha, spec);
                for (Eigen::Index j = 0; j < f.beta.size(); ++j) {
                    os << data.names[static_cast<std::size_t>(j)] << ',' << qb::format_double(f.beta(j)) << ",\n";
                }
                os << "alpha," << qb::format_double(f.alpha) << ",\n";
                os << "objective," << qb::format_double(f.objective) << ",\n";
                os << "best_start," << f.best_start << ",\n";
                os << "lower_active," << f.lower_active << ",\n";
                os << "upper_active," << f.upper_active << ",\n";
                os << "non_identified," << (f.non_identified ? 1 : 0) << ",\n";
            }
            emit(fit_out, os.str(), manifest);
            finish(manifest, manifest_path, fit_out);
        } else if (*wel) {
            const auto seq = qb::parse_alpha_list(wel_seq);
            const auto a = qb::parse_distribution(qb::read_file(wel_a));
            const auto b = qb::parse_distribution(qb::read_file(wel_b));
            std::ostringstream os;
            if (wel_kind == "dominance") {
                os << "dominance=" << qb::to_string(qb::stochastic_dominance(a, b)) << '\n';
            } else if (wel_kind == "crossing") {
                const auto r = qb::single_crossing(a, b);
                os << "kind=" << qb::to_string(r.kind) << '\n';
                os << "sign_changes=" << r.sign_changes << '\n';
                if (r.u_star) {
                    os << "u_star=" << qb::format_double(*r.u_star) << '\n'
                       << "u_lo=" << qb::format_double(*r.u_lo) << '\n'
                       << "p_star=" << qb::format_double(*r.p_star) << '\n'
                       << "p_lo=" << qb::format_double(*r.p_lo) << '\n'
                       << "p_hi=" << qb::format_double(*r.p_hi) << '\n'
                       << "riskier=" << (r.a_riskier ? "a" : "b") << '\n';
                }
                if (!r.diagnostics.empty()) os << "diagnostics=" << r.diagnostics << '\n';
            } else {
                std::vector<qb::NamedDistribution> actions{{wel_a, a}, {wel_b, b}};
                for (const auto& path : wel_more) actions.push_back({path, qb::parse_distribution(qb::read_file(path))});
                os << "rank,action";
                for (double s : seq) os << ',' << qb::alpha_label(s);
                os << '\n';
                for (const auto& r : qb::sequential_quantile_max(actions, seq)) {
                    os << r.rank << ',' << r.name;
                    for (double q : r.quantiles) os << ',' << qb::format_double(q);
                    os << '\n';
                }
            }
            emit(wel_out, os.str(), manifest);
            finish(manifest, manifest_path, wel_out);
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const qb::IdentificationError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const qb::RankError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
