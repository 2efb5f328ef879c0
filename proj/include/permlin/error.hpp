#pragma once

#include <stdexcept>
#include <string>

namespace permlin {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input lies outside the mathematical domain of an operation
/// (non-positive-definite covariance, non-finite coordinates).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or constraint-violating arguments (dimensions, parameters, bases).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// An iterative routine failed to converge within its cap.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The operation declined to run: factorial guard exceeded or a premise is unmet.
class RefusalError : public Error {
public:
    using Error::Error;
};

} // namespace permlin
