#pragma once

#include <stdexcept>
#include <string>

namespace pmrd {

// Base for every error raised by the library. The CLI maps the two
// families below onto exit codes 2 (input/domain) and 3 (runtime solver).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InputError : public Error {
public:
    using Error::Error;
};

class RuntimeFailure : public Error {
public:
    using Error::Error;
};

/// Malformed reaction system (bad lengths, coefficients out of range).
class InvalidSystem : public InputError {
public:
    using InputError::InputError;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public InputError {
public:
    using InputError::InputError;
};

/// Initial data carry no positive mass, so no positive equilibrium exists.
class DegenerateMass : public InputError {
public:
    using InputError::InputError;
};

/// A documented precondition of a functional inequality check fails.
class PreconditionError : public InputError {
public:
    using InputError::InputError;
};

/// Exponent parameters that make an interpolation exponent leave (0,1).
class InconsistentParameters : public InputError {
public:
    using InputError::InputError;
};

/// Configuration parse or validation failure; carries the offending line.
class ConfigError : public InputError {
public:
    ConfigError(const std::string& msg, int line)
        : InputError(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Something that should be impossible for admissible input happened.
class InternalInconsistency : public RuntimeFailure {
public:
    using RuntimeFailure::RuntimeFailure;
};

/// Explicit step rejected too many times.
class StiffnessError : public RuntimeFailure {
public:
    using RuntimeFailure::RuntimeFailure;
};

class LinearSolverError : public RuntimeFailure {
public:
    using RuntimeFailure::RuntimeFailure;
};

/// Too few usable samples for a regression.
class FitError : public RuntimeFailure {
public:
    using RuntimeFailure::RuntimeFailure;
};

}  // namespace pmrd
