#pragma once

#include <stdexcept>
#include <string>

namespace tailvega {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad or inconsistent inputs (configs, preconditions). CLI exit code 2.
struct InputError : Error {
    using Error::Error;
};
struct ConfigError : InputError {
    using InputError::InputError;
};
struct OutOfRange : InputError {
    using InputError::InputError;
};
struct OutOfDomain : InputError {
    using InputError::InputError;
};
struct EmptySample : InputError {
    using InputError::InputError;
};
struct Ambiguous : InputError {
    using InputError::InputError;
};

// Numerical failures. CLI exit code 3.
struct NumericError : Error {
    using Error::Error;
};
struct NonConvergence : NumericError {
    using NumericError::NumericError;
};
struct InvalidBracket : NumericError {
    using NumericError::NumericError;
};
struct NoBracket : NumericError {
    using NumericError::NumericError;
};
struct NotMonomodal : NumericError {
    using NumericError::NumericError;
};
struct DegenerateParameter : NumericError {
    using NumericError::NumericError;
};
struct EvaluationFailure : NumericError {
    using NumericError::NumericError;
};

// The requested measure does not exist (infinite semi-moment). CLI exit code 4.
struct DivergentIntegral : Error {
    using Error::Error;
};

}  // namespace tailvega
