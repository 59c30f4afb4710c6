// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qalybound/bounds.hpp"
#include "qalybound/config.hpp"
#include "qalybound/errors.hpp"
#include "qalybound/simulate.hpp"
#include "qalybound/welfare.hpp"

namespace qalybound {

inline constexpr std::string_view kToolVersion = "0.3.0";

//---------------------------------------------------------------------------//
// Files and checksums

/// FNV-1a 64-bit hash.
inline std::uint64_t fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char ch : bytes) {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, std::string_view contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

inline std::uint64_t file_checksum(const std::string& path) { return fnv1a64(read_file(path)); }

//---------------------------------------------------------------------------//
// Minimal CSV reader: comma separated, no quoting (none of our files need it)

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) return std::nullopt;
        return static_cast<std::size_t>(it - header.begin());
    }

    std::size_t require(std::string_view name) const {
        if (auto c = column(name)) return *c;
        throw SchemaError("missing required column '" + std::string(name) + "'");
    }
};

inline std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.emplace_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                                   : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

inline CsvTable parse_csv(std::string_view text) {
    CsvTable t;
    bool have_header = false;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (trim(line).empty() || line.front() == '#') continue;
        auto fields = split_csv_line(line);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(t.header.size()) + " fields, found " +
                              std::to_string(fields.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (!have_header) throw SchemaError("file has no header row");
    return t;
}

//---------------------------------------------------------------------------//
// Subject files

inline const std::vector<std::string>& subject_columns() {
    static const std::vector<std::string> cols{"id",  "h1",        "h2",         "h3",      "h4",
                                               "h5",  "state",     "mortality",  "years_alive",
                                               "qaly_lo", "qaly_hi", "exact"};
    return cols;
}

/// CSV text for a dataset; oracle columns q_true, qaly_true only on request.
inline std::string format_dataset(const Dataset& ds, bool with_oracle) {
    if (with_oracle && !ds.has_oracle) {
        throw SchemaError("dataset carries no oracle values to write");
    }
    std::string out;
    out.reserve(ds.observations.size() * 64 + 128);
    for (std::size_t i = 0; i < subject_columns().size(); ++i) {
        if (i) out += ',';
        out += subject_columns()[i];
    }
    if (with_oracle) out += ",q_true,qaly_true";
    out += '\n';
    for (const auto& o : ds.observations) {
        out += std::to_string(o.id);
        for (int k = 0; k < kDimensions; ++k) {
            out += ',';
            out += static_cast<char>('0' + o.state.level(k));
        }
        out += ',';
        out += o.state.code();
        out += ',';
        out += format_double(o.mortality);
        out += ',';
        out += std::to_string(o.years_alive);
        out += ',';
        out += format_double(o.interval.lo);
        out += ',';
        out += format_double(o.interval.hi);
        out += o.interval.exact ? ",1" : ",0";
        if (with_oracle) {
            out += ',';
            out += format_double(*o.oracle_q);
            out += ',';
            out += format_double(*o.oracle_qaly);
        }
        out += '\n';
    }
    return out;
}

inline void write_dataset(const std::string& path, const Dataset& ds, bool with_oracle = false) {
    write_file(path, format_dataset(ds, with_oracle));
}

struct ReadOptions {
    bool require_oracle = false;
};

/*!
 * Parses a subject file. Oracle columns are optional: when absent,
 * has_oracle is false and every observation's oracle fields are empty.
 * Errors name the offending column or data row (1-based, header excluded).
 */
inline Dataset parse_dataset(std::string_view text, const ReadOptions& opts = {}) {
    const auto table = parse_csv(text);
    std::vector<std::size_t> idx;
    for (const auto& name : subject_columns()) idx.push_back(table.require(name));
    const auto q_col = table.column("q_true");
    const auto x_col = table.column("qaly_true");
    if (q_col.has_value() != x_col.has_value()) {
        throw SchemaError("oracle columns must appear together: missing '" +
                          std::string(q_col ? "qaly_true" : "q_true") + "'");
    }
    if (opts.require_oracle && !q_col) throw SchemaError("oracle column 'q_true' is absent");

    Dataset ds;
    ds.has_oracle = q_col.has_value();
    ds.observations.reserve(table.rows.size());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const auto fail = [&](const std::string& what) {
            return SchemaError("row " + std::to_string(r + 1) + ": " + what);
        };
        Observation o;
        if (!parse_int(row[idx[0]], o.id)) throw fail("bad id '" + row[idx[0]] + "'");
        if (o.id != r) throw fail("ids must be contiguous from 0");
        HealthState::Levels levels{};
        for (int k = 0; k < kDimensions; ++k) {
            int level = 0;
            if (!parse_int(row[idx[1 + k]], level) || level < 1 || level > 3) {
                throw fail("bad level in column h" + std::to_string(k + 1));
            }
            levels[k] = static_cast<std::uint8_t>(level);
        }
        o.state = HealthState(levels);
        if (row[idx[6]] != o.state.code()) throw fail("state code does not match h1..h5");
        if (!parse_double(row[idx[7]], o.mortality)) throw fail("bad mortality");
        if (!parse_int(row[idx[8]], o.years_alive) || o.years_alive < 0 || o.years_alive > kHorizon) {
            throw fail("bad years_alive");
        }
        if (!parse_double(row[idx[9]], o.interval.lo) || !parse_double(row[idx[10]], o.interval.hi) ||
            !(o.interval.lo <= o.interval.hi)) {
            throw fail("bad QALY interval");
        }
        const auto& ex = row[idx[11]];
        if (ex != "0" && ex != "1") throw fail("exact must be 0 or 1");
        o.interval.exact = ex == "1";
        if (o.interval.exact != (o.interval.lo == o.interval.hi)) {
            throw fail("exact flag disagrees with interval width");
        }
        if (q_col) {
            double q = 0.0, x = 0.0;
            if (!parse_double(row[*q_col], q) || !parse_double(row[*x_col], x)) {
                throw fail("bad oracle value");
            }
            o.oracle_q = q;
            o.oracle_qaly = x;
        }
        ds.observations.push_back(std::move(o));
    }
    return ds;
}

inline Dataset read_dataset(const std::string& path, const ReadOptions& opts = {}) {
    return parse_dataset(read_file(path), opts);
}

//---------------------------------------------------------------------------//
// Summary tables

inline std::string alpha_label(double alpha) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "q%.2f", alpha);
    return buf;
}

inline std::string fixed2(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    std::string s = buf;
    if (s == "-0.00") s = "0.00";
    return s;
}

/// Table of per-state bounds: h, n_obs, (L, U) per alpha, mean L and U.
inline std::string format_state_table(std::span<const StateSummary> rows, std::span<const double> alphas) {
    std::string out = "h,n_obs";
    for (double a : alphas) out += "," + alpha_label(a) + "_L," + alpha_label(a) + "_U";
    out += ",mean_L,mean_U,flag\n";
    for (const auto& s : rows) {
        out += s.state.code() + "," + std::to_string(s.n);
        for (const auto& b : s.quantile_bounds) out += "," + format_double(b.lo) + "," + format_double(b.hi);
        out += "," + fixed2(s.mean_bound.lo) + "," + fixed2(s.mean_bound.hi);
        out += s.below_min_count ? ",low-n\n" : ",\n";
    }
    return out;
}

/// Thresholds lo, lo + step, ..., hi parsed from "lo:hi:step".
inline std::vector<double> parse_grid(std::string_view spec) {
    const auto c1 = spec.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : spec.find(':', c1 + 1);
    double lo = 0, hi = 0, step = 0;
    if (c2 == std::string_view::npos || !parse_double(spec.substr(0, c1), lo) ||
        !parse_double(spec.substr(c1 + 1, c2 - c1 - 1), hi) || !parse_double(spec.substr(c2 + 1), step) ||
        !(step > 0.0) || !(lo <= hi)) {
        throw std::invalid_argument("grid must look like lo:hi:step with step > 0 and lo <= hi");
    }
    const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
    std::vector<double> grid;
    for (std::size_t i = 0; i < count; ++i) grid.push_back(lo + static_cast<double>(i) * step);
    return grid;
}

inline std::vector<double> parse_alpha_list(std::string_view list) {
    std::vector<double> out;
    for (const auto& field : split_csv_line(list)) {
        double a = 0.0;
        if (!parse_double(field, a) || !(a > 0.0 && a <= 1.0)) {
            throw std::invalid_argument("quantile levels must lie in (0, 1]: '" + field + "'");
        }
        out.push_back(a);
    }
    if (out.empty()) throw std::invalid_argument("empty quantile list");
    return out;
}

inline std::string format_cdf_bounds(const IntervalSample& sample, std::span<const double> grid) {
    std::string out = "threshold,cdf_lo,cdf_hi\n";
    for (double c : grid) {
        const auto b = sample.cdf(c);
        out += format_double(c) + "," + format_double(b.lo) + "," + format_double(b.hi) + "\n";
    }
    return out;
}

inline std::string format_comparison(const PolicyComparison& cmp, std::span<const double> alphas) {
    std::string out = "stat,a_lo,a_hi,b_lo,b_hi,diff_lo,diff_hi\n";
    for (std::size_t i = 0; i < alphas.size(); ++i) {
        const auto& a = cmp.quantiles_a[i];
        const auto& b = cmp.quantiles_b[i];
        const auto& d = cmp.quantile_differences[i];
        out += alpha_label(alphas[i]) + "," + format_double(a.lo) + "," + format_double(a.hi) + "," +
               format_double(b.lo) + "," + format_double(b.hi) + "," + format_double(d.lo) + "," +
               format_double(d.hi) + "\n";
    }
    out += "mean," + format_double(cmp.mean_a.lo) + "," + format_double(cmp.mean_a.hi) + "," +
           format_double(cmp.mean_b.lo) + "," + format_double(cmp.mean_b.hi) + "," +
           format_double(cmp.mean_difference.lo) + "," + format_double(cmp.mean_difference.hi) + "\n";
    return out;
}

/// Reads (value, prob) rows; duplicate values are merged.
inline EmpiricalDistribution parse_distribution(std::string_view text) {
    const auto table = parse_csv(text);
    const auto vcol = table.require("value");
    const auto pcol = table.require("prob");
    std::map<double, double> mass;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        double v = 0.0, p = 0.0;
        if (!parse_double(table.rows[r][vcol], v) || !parse_double(table.rows[r][pcol], p)) {
            throw SchemaError("row " + std::to_string(r + 1) + ": bad value or prob");
        }
        mass[v] += p;
    }
    std::vector<double> support, probs;
    for (const auto& [v, p] : mass) {
        support.push_back(v);
        probs.push_back(p);
    }
    return {std::move(support), std::move(probs)};
}

//---------------------------------------------------------------------------//
// Run manifest

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp = std::chrono::system_clock::now()) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct RunManifest {
    std::string command;
    std::optional<SimConfig> config;
    std::string tool_version{kToolVersion};
    std::string started_at;
    std::string finished_at;
    std::map<std::string, std::uint64_t> output_checksums;

    void record_output(const std::string& path) { output_checksums[path] = file_checksum(path); }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["tool_version"] = tool_version;
        j["started_at"] = started_at;
        j["finished_at"] = finished_at;
        if (config) j["config"] = serialize_config(*config);
        nlohmann::json outs = nlohmann::json::object();
        for (const auto& [file, sum] : output_checksums) outs[file] = hex64(sum);
        j["outputs"] = outs;
        return j;
    }

    static RunManifest from_json(const nlohmann::json& j) {
        RunManifest m;
        m.command = j.at("command").get<std::string>();
        m.tool_version = j.at("tool_version").get<std::string>();
        m.started_at = j.at("started_at").get<std::string>();
        m.finished_at = j.at("finished_at").get<std::string>();
        if (j.contains("config")) m.config = parse_config(j.at("config").get<std::string>());
        for (const auto& [file, sum] : j.at("outputs").items()) {
            m.output_checksums[file] = std::stoull(sum.get<std::string>(), nullptr, 16);
        }
        return m;
    }

    void write(const std::string& path) const { write_file(path, to_json().dump(2) + "\n"); }
};

}  // namespace qalybound
