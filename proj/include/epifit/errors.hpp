#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace epifit {

/// Base class for all epifit errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line` is 1-based, 0 when not tied to a line.
struct ParseError : Error {
    explicit ParseError(const std::string& msg, std::size_t line_no = 0)
        : Error(line_no ? "line " + std::to_string(line_no) + ": " + msg : msg),
          line(line_no) {}
    std::size_t line = 0;
};

/// Violated series or parameter invariants, stitch failures, bad arguments.
struct DataError : Error {
    using Error::Error;
};

/// Integration aborted; `last_time` is the last successfully reached time.
struct IntegrationError : Error {
    IntegrationError(const std::string& msg, double t)
        : Error(msg + " at t=" + std::to_string(t) + " weeks"), last_time(t) {}
    double last_time = 0.0;
};

/// Optimization could not produce a usable result.
struct FitError : Error {
    using Error::Error;
};

}  // namespace epifit
