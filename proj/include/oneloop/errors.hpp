#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace oneloop {

/// Malformed expression source. `column` is 1-based.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t column)
        : std::runtime_error("column " + std::to_string(column) + ": " + what), column_(column) {}

    std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Bad argument to an operation (order out of range, grid too small, ...).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numeric-domain failures: out-of-domain points, log of a non-positive number,
/// non-positive mass, orbits leaving the domain.
class DomainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Omega^2 <= 0 where a real frequency is required.
class NonPositiveFrequency : public DomainError {
public:
    NonPositiveFrequency(const std::string& what, double x) : DomainError(what), x_(x) {}
    double x() const noexcept { return x_; }

private:
    double x_;
};

/// A lattice operator that should be positive definite is not.
class NotPositiveDefinite : public DomainError {
public:
    NotPositiveDefinite(const std::string& what, std::size_t index)
        : DomainError(what + " (first non-positive pivot at index " + std::to_string(index) + ")"),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// A self-consistency assertion inside the library failed.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace oneloop
