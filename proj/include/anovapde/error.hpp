#pragma once

#include <stdexcept>
#include <string>

namespace anovapde {

// Exit codes used by the command line runner map onto these categories.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model, product or numerical configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of an operation (e.g. a non-positive rate).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iteration budget exceeded, singular pivot, non-finite result.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A combination step is missing a value it needs.
class IncompletePlanError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace anovapde
