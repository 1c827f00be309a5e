#pragma once

#include <stdexcept>
#include <string>

namespace lpsmooth {

/// Argument outside the mathematical domain of an operation (q < 1, |s| > 1, bad axis, ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Shell range incompatible with grid resolution or box size.
class RangeError : public std::out_of_range {
public:
    explicit RangeError(const std::string& what) : std::out_of_range(what) {}
};

/// Time stepper detected runaway growth in a local stage.
class StabilityError : public std::runtime_error {
public:
    StabilityError(const std::string& what, long step) : std::runtime_error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

/// Malformed configuration or command line; carries the offending key.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(const std::string& field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(field) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

} // namespace lpsmooth
