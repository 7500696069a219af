#pragma once

#include <stdexcept>
#include <string>

namespace dar {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, out-of-range value, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A numerical kernel could not produce a well-defined result
/// (non-finite data, rank deficiency, loss of positive definiteness).
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A time-stepping computation produced a non-finite value.
class DivergenceError : public NumericalError {
public:
    DivergenceError(const std::string& what, std::size_t step)
        : NumericalError(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

}  // namespace dar
