// Exception types shared by all netform modules.
#pragma once

#include <stdexcept>
#include <string>

namespace netform {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid mathematical input (bad exponent, degenerate bounds, ...).
struct DomainError : Error {
    using Error::Error;
};

// A field contains NaN or infinity where finite values are required.
struct NonFiniteField : Error {
    using Error::Error;
};

// An iterative linear solve hit its iteration cap without meeting tolerance.
struct SolverDiverged : Error {
    using Error::Error;
};

// A time step produced non-finite values.
struct BlowUp : Error {
    using Error::Error;
};

// A ball/cylinder probe contains no grid nodes.
struct EmptyBall : Error {
    using Error::Error;
};

// A trajectory is too sparsely sampled for the requested diagnostic.
struct InsufficientSnapshots : Error {
    using Error::Error;
};

// A Picard trace is too short to interpret.
struct TooShortTrace : Error {
    using Error::Error;
};

// Config text could not be parsed; carries the 1-based line number.
struct ParseError : Error {
    int line;
    ParseError(int line_no, const std::string& what)
        : Error("line " + std::to_string(line_no) + ": " + what), line(line_no) {}
};

// Config parsed but a value violates its contract; carries the key.
struct ValidationError : Error {
    std::string key;
    ValidationError(const std::string& key_name, const std::string& reason)
        : Error(key_name + ": " + reason), key(key_name) {}
};

// A snapshot file is malformed (bad magic, version, or length).
struct FormatError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace netform
