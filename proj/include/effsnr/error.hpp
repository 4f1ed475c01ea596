// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace effsnr {

/// Invalid input to an operation (bad dimensions, out-of-range values).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed trace or table file. `record()` is the 0-based record index when
/// the failure is inside a record, empty for header-level failures.
class ParseError : public std::runtime_error {
public:
    ParseError(std::optional<std::size_t> record, const std::string& what);
    std::optional<std::size_t> record() const noexcept { return record_; }

private:
    std::optional<std::size_t> record_;
};

/// Inconsistent configuration, e.g. a configuration space that references an
/// MCS missing from the threshold table.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace effsnr
