#pragma once

#include <stdexcept>
#include <string>

namespace hqc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state occupies the top of the truncated Fock basis, or a coherent
/// packet leaks out of it.
class TruncationError : public Error {
public:
    using Error::Error;
};

/// Non-finite values, norm explosion, or runaway classical coordinates.
class NumericalBlowup : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class DegenerateSuperposition : public Error {
public:
    using Error::Error;
};

class DegenerateState : public Error {
public:
    using Error::Error;
};

class NonHermitian : public Error {
public:
    using Error::Error;
};

class UnsupportedPotential : public Error {
public:
    using Error::Error;
};

class InvalidDensityMatrix : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// More trajectories of an ensemble failed than the allowed fraction.
class EnsembleFailure : public Error {
public:
    using Error::Error;
};

/// Configuration problem. `field()` is a dotted path such as
/// `coupling.sigma`; empty when the problem is file-level.
class ConfigError : public Error {
public:
    ConfigError(std::string field, const std::string& reason)
        : Error(field.empty() ? reason : field + ": " + reason), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

}  // namespace hqc
