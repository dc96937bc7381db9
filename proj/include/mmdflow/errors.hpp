#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mmdflow {

// Base class for every error raised by the library. Carries an optional
// step index that run_flow attaches before rethrowing.
class Error : public std::exception {
public:
    explicit Error(std::string message) : message_(std::move(message)) {}

    const char* what() const noexcept override { return message_.c_str(); }

    std::optional<std::size_t> step() const { return step_; }

    void attach_step(std::size_t step) {
        if (!step_) {
            step_ = step;
            message_ += " (at step " + std::to_string(step) + ")";
        }
    }

private:
    std::string message_;
    std::optional<std::size_t> step_;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Quadrature or root finding failed to reach its tolerance.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The target has atoms, so the gradient (and the explicit scheme) is undefined.
class AtomicTargetError : public Error {
public:
    using Error::Error;
};

class MonotonicityError : public Error {
public:
    MonotonicityError(std::string message, std::size_t violations)
        : Error(std::move(message)), violations_(violations) {}

    std::size_t violations() const { return violations_; }

private:
    std::size_t violations_;
};

class NotDiscreteTarget : public Error {
public:
    using Error::Error;
};

/// Requested pointwise solution at a jump of the target quantile function.
class DiscontinuityPoint : public Error {
public:
    using Error::Error;
};

/// Malformed configuration or measure expression. Line and column are
/// 1-based; zero means "not tied to a position".
class ConfigError : public Error {
public:
    ConfigError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
        : Error(format(message, line, column)), reason_(message), line_(line), column_(column) {}

    /// The message without the position prefix.
    const std::string& reason() const { return reason_; }
    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& message, std::size_t line, std::size_t column) {
        if (line == 0) return message;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
    }

    std::string reason_;
    std::size_t line_;
    std::size_t column_;
};

} // namespace mmdflow
