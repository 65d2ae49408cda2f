#pragma once

#include <stdexcept>

namespace concnls {

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shooting: no sign change of the height classifier in the searched range.
struct NoBracketError : SolverError {
    using SolverError::SolverError;
};

/// Iteration cap reached without meeting the tolerance.
struct MaxIterError : SolverError {
    using SolverError::SolverError;
};

/// Bisection bracket fails its sign precondition.
struct BracketError : SolverError {
    using SolverError::SolverError;
};

/// SCF: fewer bound levels than particles at convergence.
struct NoBoundStateError : SolverError {
    using SolverError::SolverError;
};

/// Gradient flow: persistent energy increase (step-size failure).
struct DivergedError : SolverError {
    using SolverError::SolverError;
};

} // namespace concnls
