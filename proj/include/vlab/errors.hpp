// Exception types shared across the library. Each maps to a CLI exit class:
// config (2), convergence (3), domain/evaluation (4).
#pragma once

#include <stdexcept>
#include <string>

namespace vlab {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// configuration / schema problems
struct ConfigError : Error {
    using Error::Error;
};

// iteration or quadrature failed to reach the requested tolerance
struct ConvergenceError : Error {
    using Error::Error;
};
struct QuadratureError : ConvergenceError {
    using ConvergenceError::ConvergenceError;
};
struct LinearSolveError : ConvergenceError {
    using ConvergenceError::ConvergenceError;
};

// evaluation outside the validity domain of an operation
struct DomainError : Error {
    using Error::Error;
};
struct PoleError : DomainError {
    using DomainError::DomainError;
};
struct SingularGeneratorError : DomainError {
    using DomainError::DomainError;
};
struct EscapeError : DomainError {
    using DomainError::DomainError;
};
struct DegenerateDegree : DomainError {
    using DomainError::DomainError;
};
struct MethodMismatch : ConfigError {
    using ConfigError::ConfigError;
};
struct AsymmetryError : Error {
    using Error::Error;
};

} // namespace vlab
