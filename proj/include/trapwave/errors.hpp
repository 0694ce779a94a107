#pragma once

#include <stdexcept>
#include <string>

namespace trapwave {

/// Base class for numerical failures (as opposed to invalid input).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Evaluation at a pole of the function (e.g. a Hankel function at z = 0).
class SingularityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Result is finite mathematically but not representable in double precision.
class OverflowError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The angular-mode tail has not decayed by the truncation order.
class TruncationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Argument-principle winding did not settle on an integer.
class ContourError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Discrete linear system could not be factorized.
class PivotError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Operation is not defined for the given scatterer kind.
class NotApplicableError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent configuration input.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Too few usable samples for a fit.
class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace trapwave
