#pragma once

#include <stdexcept>
#include <string>

namespace infctl {

/// Base of every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error record.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual const char* kind() const noexcept = 0;
};

/// Invalid parameters or a point outside the state space.
class DomainError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "domain"; }
};

/// Inputs that are individually valid but inconsistent with each other.
class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "config"; }
};

class NumericalError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "numerical"; }
};

/// A sample path whose jumps are not admissible.
class PathError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "path"; }
};

class PolicyError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "policy"; }
};

class ParseError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "parse"; }
};

}  // namespace infctl
