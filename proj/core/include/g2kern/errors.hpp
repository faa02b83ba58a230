#pragma once

#include <stdexcept>
#include <string>

namespace g2kern {

// A point or parameter lies outside its admissible domain.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A point of C^2 fails membership in the symmetrized bidisc.
class NotInG2Error : public DomainError {
public:
    using DomainError::DomainError;
};

// A numerical evaluation could not reach its accuracy contract.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The two bracket terms of the raw Bergman formula agree to more than
// twelve digits; the quotient has lost too many digits to cancellation.
class CancellationError : public NumericError {
public:
    using NumericError::NumericError;
};

class NonConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

// Analytic continuation of a logarithm hit the refinement cap.
class BranchTrackingError : public NumericError {
public:
    using NumericError::NumericError;
};

// Requested real power of a kernel whose non-vanishing is not established.
class UnsupportedPowerError : public DomainError {
public:
    using DomainError::DomainError;
};

// Chart conversion attempted where the symmetrization Jacobian degenerates.
class SingularJacobianError : public NumericError {
public:
    using NumericError::NumericError;
};

} // namespace g2kern
