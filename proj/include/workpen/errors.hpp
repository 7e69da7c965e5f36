// errors.hpp — Exception types shared across the library
#pragma once

#include <stdexcept>
#include <string>

namespace workpen {

// Base for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A matrix failed the Hermiticity check.
struct NonHermitianError : Error {
    using Error::Error;
};

// Iterative diagonalization did not reach the off-diagonal threshold.
struct ConvergenceError : Error {
    using Error::Error;
};

// A scalar function was evaluated outside its domain (ln of <= 0, exp overflow).
struct DomainError : Error {
    using Error::Error;
};

struct DimMismatchError : Error {
    using Error::Error;
};

// Candidate matrix is not a density matrix; message names the violated clause.
struct NotADensityMatrixError : Error {
    using Error::Error;
};

struct OverflowError : Error {
    using Error::Error;
};

struct OutOfRangeError : Error {
    using Error::Error;
};

// Instantaneous spectrum has a gap too small for eigenbasis jump operators.
struct DegenerateSpectrumError : Error {
    using Error::Error;
};

// Integrator state left the physical set (simplex / positive cone) beyond tolerance.
struct StepTooLargeError : Error {
    using Error::Error;
};

// Diagonal-reduction preconditions violated.
struct NotDiagonalError : Error {
    using Error::Error;
};

// Configuration document is not well-formed.
struct ParseError : Error {
    using Error::Error;
};

// Configuration is well-formed but violates an invariant; message names it.
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace workpen
