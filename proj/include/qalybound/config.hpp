// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>

#include "qalybound/errors.hpp"
#include "qalybound/popmodel.hpp"

namespace qalybound {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

template <class Int>
bool parse_int(std::string_view s, Int& out) {
    if (s.empty()) return false;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::string to_string(BracketMode m) {
    return m == BracketMode::qaly_unit ? "qaly-unit" : "utility-tenths";
}

inline std::string to_string(CutpointScheme s) {
    return s == CutpointScheme::per_subject ? "per-subject" : "shared";
}

namespace detail {
inline Range parse_range(std::string_view value, std::size_t line, std::string_view key) {
    const auto comma = value.find(',');
    Range r;
    if (comma == std::string_view::npos || !parse_double(trim(value.substr(0, comma)), r.lo) ||
        !parse_double(trim(value.substr(comma + 1)), r.hi)) {
        throw ConfigError(line, std::string(key) + " expects 'lo,hi', got '" + std::string(value) + "'");
    }
    if (!(r.lo <= r.hi)) throw ConfigError(line, std::string(key) + " needs lo <= hi");
    return r;
}

inline void check_range_within(const Range& r, double lo, double hi, bool open_lo, std::size_t line,
                               std::string_view key) {
    const bool lo_ok = open_lo ? r.lo > lo : r.lo >= lo;
    if (!lo_ok || r.hi > hi) {
        throw ConfigError(line, std::string(key) + " must lie within " + (open_lo ? "(" : "[") +
                                    format_double(lo) + ", " + format_double(hi) + "]");
    }
}
}  // namespace detail

/*!
 * Parses "key=value" lines. Blank lines and '#' comments are ignored;
 * unspecified keys keep their defaults. Unknown keys, repeated keys,
 * malformed lines and out-of-range values raise ConfigError with the line
 * number.
 *
 * Keys: n, seed, horizon, uRange, cRange, wRange, mortCoef, bracketMode,
 * cutpointScheme.
 */
inline SimConfig parse_config(std::string_view text) {
    SimConfig cfg;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(line_no, "expected key=value, got '" + std::string(line) + "'");
        }
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) throw ConfigError(line_no, "duplicate key '" + key + "'");

        if (key == "n") {
            if (!parse_int(value, cfg.n) || cfg.n < 1) {
                throw ConfigError(line_no, "n must be a positive integer");
            }
        } else if (key == "seed") {
            if (!parse_int(value, cfg.seed)) throw ConfigError(line_no, "seed must be an unsigned 64-bit integer");
        } else if (key == "horizon") {
            if (!parse_int(value, cfg.horizon) || cfg.horizon < 1 || cfg.horizon > kHorizon) {
                throw ConfigError(line_no, "horizon must be an integer in [1, 10]");
            }
        } else if (key == "uRange") {
            cfg.u_range = detail::parse_range(value, line_no, key);
            detail::check_range_within(cfg.u_range, 0.0, 1.0, true, line_no, key);
        } else if (key == "cRange") {
            cfg.c_range = detail::parse_range(value, line_no, key);
            detail::check_range_within(cfg.c_range, 0.0, 1.0, true, line_no, key);
        } else if (key == "wRange") {
            cfg.w_range = detail::parse_range(value, line_no, key);
            detail::check_range_within(cfg.w_range, 0.0, 0.4, false, line_no, key);
        } else if (key == "mortCoef") {
            if (!parse_double(value, cfg.mort_coef) || !(cfg.mort_coef > 0.0) ||
                !(cfg.mort_coef * 15.0 < 1.0)) {
                throw ConfigError(line_no, "mortCoef must lie in (0, 1/15)");
            }
        } else if (key == "bracketMode") {
            if (value == "qaly-unit") {
                cfg.bracket_mode = BracketMode::qaly_unit;
            } else if (value == "utility-tenths") {
                cfg.bracket_mode = BracketMode::utility_tenths;
            } else {
                throw ConfigError(line_no, "bracketMode '" + std::string(value) +
                                               "' is not one of {qaly-unit, utility-tenths}");
            }
        } else if (key == "cutpointScheme") {
            if (value == "per-subject") {
                cfg.cutpoint_scheme = CutpointScheme::per_subject;
            } else if (value == "shared") {
                cfg.cutpoint_scheme = CutpointScheme::shared;
            } else {
                throw ConfigError(line_no, "cutpointScheme '" + std::string(value) +
                                               "' is not one of {per-subject, shared}");
            }
        } else {
            throw ConfigError(line_no, "unknown key '" + key + "'");
        }
    }
    return cfg;
}

/// Canonical text form; parse_config(serialize_config(c)) == c.
inline std::string serialize_config(const SimConfig& cfg) {
    std::ostringstream os;
    os << "n=" << cfg.n << '\n'
       << "seed=" << cfg.seed << '\n'
       << "horizon=" << cfg.horizon << '\n'
       << "uRange=" << format_double(cfg.u_range.lo) << ',' << format_double(cfg.u_range.hi) << '\n'
       << "cRange=" << format_double(cfg.c_range.lo) << ',' << format_double(cfg.c_range.hi) << '\n'
       << "wRange=" << format_double(cfg.w_range.lo) << ',' << format_double(cfg.w_range.hi) << '\n'
       << "mortCoef=" << format_double(cfg.mort_coef) << '\n'
       << "bracketMode=" << to_string(cfg.bracket_mode) << '\n'
       << "cutpointScheme=" << to_string(cfg.cutpoint_scheme) << '\n';
    return os.str();
}

}  // namespace qalybound
