#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fmcf {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tangent frame handed to a weight query is not orthonormal.
class FrameError : public Error {
public:
    using Error::Error;
};

/// The polygon failed the mesh guards (N, spacing, spacing ratio).
class DegenerateMeshError : public Error {
public:
    DegenerateMeshError(const std::string& what, std::size_t index)
        : Error(what + " (node " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Invalid configuration value; `field` is the dotted path of the offender.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Malformed request to a verification routine.
class InputError : public Error {
public:
    using Error::Error;
};

/// Closed-form solution queried outside its interval of existence.
class DomainError : public Error {
public:
    DomainError(const std::string& what, double extinction_time)
        : Error(what), extinction_time_(extinction_time) {}

    double extinction_time() const noexcept { return extinction_time_; }

private:
    double extinction_time_;
};

}  // namespace fmcf
