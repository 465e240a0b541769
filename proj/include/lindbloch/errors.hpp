#pragma once

#include <stdexcept>
#include <string>

namespace lindbloch {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define LINDBLOCH_DEFINE_ERROR(Name)                 \
    class Name : public Error {                      \
    public:                                          \
        using Error::Error;                          \
    }

/// Bloch vector outside the unit ball (beyond the construction slack).
LINDBLOCH_DEFINE_ERROR(BallViolation);
/// 2x2 matrix that is not Hermitian, unit trace and positive semidefinite.
LINDBLOCH_DEFINE_ERROR(InvalidDensity);
/// Argument outside the mathematical domain of a function.
LINDBLOCH_DEFINE_ERROR(DomainError);
/// Bad parameter value (negative decay rate, non-positive frequency, ...).
LINDBLOCH_DEFINE_ERROR(InvalidArgument);
/// Time interval or sample range that is empty or reversed.
LINDBLOCH_DEFINE_ERROR(BadRange);
/// Eigen-solver residual above tolerance after the fallback iteration.
LINDBLOCH_DEFINE_ERROR(SolverFailure);
/// Closed-form solution requested outside its validity domain.
LINDBLOCH_DEFINE_ERROR(RegimeMismatch);
/// Angular right-hand side evaluated at a pole where cot(theta) diverges.
LINDBLOCH_DEFINE_ERROR(PoleSingularity);
/// Adaptive integrator needed a step below the minimum step size.
LINDBLOCH_DEFINE_ERROR(StepUnderflow);
/// Too few samples inside the fit window.
LINDBLOCH_DEFINE_ERROR(InsufficientSamples);

#undef LINDBLOCH_DEFINE_ERROR

}  // namespace lindbloch
