#pragma once

#include <stdexcept>
#include <string>

namespace ctrw {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

class SimulationError : public Error {
public:
    using Error::Error;
};

// A configured resource cap (event count, sample count) was exceeded.
class ResourceError : public Error {
public:
    ResourceError(const std::string& what, long long cap)
        : Error(what + " (cap " + std::to_string(cap) + ")"), cap_(cap) {}
    long long cap() const noexcept { return cap_; }

private:
    long long cap_;
};

// Query too close to the edge of a sampled Poisson window.
class BoundaryError : public Error {
public:
    using Error::Error;
};

class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double error_estimate)
        : Error(what), error_estimate_(error_estimate) {}
    double error_estimate() const noexcept { return error_estimate_; }

private:
    double error_estimate_;
};

class DivergentSumError : public Error {
public:
    using Error::Error;
};

class CalibrationError : public Error {
public:
    CalibrationError(const std::string& what, double distance)
        : Error(what), distance_(distance) {}
    double distance() const noexcept { return distance_; }

private:
    double distance_;
};

// Invalid configuration (bad key, bad value, violated assumption).
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace ctrw
