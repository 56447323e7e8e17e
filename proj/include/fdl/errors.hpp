#pragma once

#include <stdexcept>
#include <string>

namespace fdl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value (CLI exit code 2).
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Malformed, truncated or inconsistent persisted data (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

/// Non-finite loss or similar numeric breakdown (CLI exit code 4).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Adaptive ODE integration gave up; carries the time it failed at.
class IntegrationError : public NumericError {
public:
    IntegrationError(const std::string& what, double t)
        : NumericError(what + " (t=" + std::to_string(t) + ")"), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Operation called in the wrong object state (e.g. backward before forward).
class StateError : public Error {
public:
    using Error::Error;
};

}  // namespace fdl
