#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace teamstab {

/// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input row, bad header, or an unmappable course name.
struct ParseError : Error {
    explicit ParseError(const std::string& msg, std::size_t row_number = 0)
        : Error(row_number > 0 ? "row " + std::to_string(row_number) + ": " + msg : msg),
          row(row_number) {}

    std::size_t row;  // 1-based input row, 0 when not tied to a row
};

/// Cross-record contradiction: double membership, dangling reference,
/// duplicate keys, violated cohort floor.
struct ConsistencyError : Error {
    using Error::Error;
};

/// A student or team that is not part of the cohort being queried.
struct LookupError : Error {
    using Error::Error;
};

/// Argument outside an operation's domain (i == j, delta out of (0,1], df < 1).
struct DomainError : Error {
    using Error::Error;
};

/// Unsatisfiable generator or run configuration.
struct ConfigError : Error {
    using Error::Error;
};

/// Design matrix is rank deficient; `column` names the collinear column.
struct SingularityError : Error {
    SingularityError(const std::string& msg, std::string column_name)
        : Error(msg), column(std::move(column_name)) {}

    std::string column;
};

/// Too few observations for the requested fit.
struct SampleSizeError : Error {
    using Error::Error;
};

/// Structurally invalid regression input (length mismatch, duplicate or
/// missing column names, non-finite values).
struct InputError : Error {
    using Error::Error;
};

}  // namespace teamstab
