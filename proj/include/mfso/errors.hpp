// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace mfso {

// Argument outside the documented domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A result or intermediate quantity would exceed the double range.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// Series or iteration hit its term budget before reaching tolerance.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Pointing geometry with a pole or 90 degree azimuth (division by zero in the linearization).
class SingularGeometryError : public DomainError {
public:
    using DomainError::DomainError;
};

// Truncated density whose normalizing mass is numerically zero.
class DegenerateTruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& msg, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

} // namespace mfso
