#pragma once

#include <stdexcept>
#include <string>

namespace ocvcap {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// curve construction / queries
struct LengthMismatch : Error {
    using Error::Error;
};
struct NonFinite : Error {
    using Error::Error;
};
struct NonMonotonic : Error {
    using Error::Error;
};
struct OutOfRange : Error {
    using Error::Error;
};

// coulomb counting
struct NonMonotonicTime : Error {
    using Error::Error;
};
struct NonPositiveCapacity : Error {
    using Error::Error;
};

// estimation
struct NoFeasiblePoint : Error {
    using Error::Error;
};
struct DegenerateData : Error {
    using Error::Error;
};
struct WindowTooSmall : Error {
    using Error::Error;
};
struct MissingOCV : Error {
    using Error::Error;
};

// synthetic data generation
struct RangeExceeded : Error {
    using Error::Error;
};

// metrics
struct NonPositiveActual : Error {
    using Error::Error;
};
struct NoIncludedPoints : Error {
    using Error::Error;
};
struct EmptyInput : Error {
    using Error::Error;
};

// file ingestion
struct ParseError : Error {
    ParseError(const std::string& what, long line_no, std::string column_name = "")
        : Error(what + " (line " + std::to_string(line_no) +
                (column_name.empty() ? "" : ", column '" + column_name + "'") + ")"),
          line(line_no),
          column(std::move(column_name)) {}
    long line;          // 1-based line number in the input file
    std::string column; // offending column name, when known
};
struct ValidationError : Error {
    using Error::Error;
};
struct IoError : Error {
    using Error::Error;
};

} // namespace ocvcap
