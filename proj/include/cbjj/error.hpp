#pragma once

#include <stdexcept>
#include <string>

namespace cbjj {

/// Failure categories. The CLI maps these onto process exit codes.
enum class ErrorKind {
    InvalidParameter,
    Domain,
    NonFiniteState,
    Quadrature,
    InsufficientData,
    DivideByZero,
    NotFound,
    Calibration,
    Config,
    Usage,
    Io,
    Computation,
    Cancelled,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Raised by the integrator when phi or v stops being finite.
class NonFiniteStateError : public Error {
public:
    NonFiniteStateError(long long step, const std::string& what)
        : Error(ErrorKind::NonFiniteState, what), step_(step) {}

    long long step() const noexcept { return step_; }

private:
    long long step_;
};

/// Config parse/validation failure. `line` is 0 when the error is not tied to a line.
class ConfigError : public Error {
public:
    ConfigError(std::string key, int line, const std::string& what)
        : Error(ErrorKind::Config, what), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    int line() const noexcept { return line_; }

private:
    std::string key_;
    int line_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what)
{
    throw Error(kind, what);
}

}  // namespace cbjj
