// Copyright 2026 The qalybound Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qalybound {

/// Malformed or out-of-range configuration text.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// A data file does not match its expected layout.
class SchemaError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The model parameters are not identified by the data.
class IdentificationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The design matrix is rank deficient.
class RankError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace qalybound
