#pragma once

#include <stdexcept>
#include <string>

namespace stockfc {

// The three families map one-to-one onto the CLI exit codes (2, 3, 4).

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Design matrix is rank deficient; the message names the offending columns.
struct SingularDesignError : NumericalError {
    using NumericalError::NumericalError;
};

/// Stepwise elimination removed every regressor.
struct EmptyModelError : NumericalError {
    using NumericalError::NumericalError;
};

/// Damped normal equations could not be factorized.
struct LinearSolveError : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace stockfc
