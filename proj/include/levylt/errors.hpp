#pragma once

#include <stdexcept>
#include <string>

namespace levylt {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Invalid configuration (bad parameter, exceeded budget).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Numerical procedure did not reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double partial_value, double error_estimate)
        : std::runtime_error(what), partial_value_(partial_value), error_estimate_(error_estimate) {}

    double partial_value() const noexcept { return partial_value_; }
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double partial_value_;
    double error_estimate_;
};

/// Two routes that must agree exactly did not.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace levylt
