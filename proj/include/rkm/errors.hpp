#ifndef RKM_ERRORS_HPP
#define RKM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace rkm {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments: shape mismatches, out-of-range parameters, unknown kinds.
class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

// Bad external data: missing files, parse failures, invalid configs,
// protocol violations (e.g. per-class count exceeding class size).
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Numerical failure: singular systems after jitter, degenerate labels,
// degenerate statistics, sweeps where every combination failed.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

} // namespace rkm

#endif
