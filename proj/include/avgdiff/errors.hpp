#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace avgdiff {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed field or scenario description.
class SpecError : public Error {
public:
    using Error::Error;
};

/// A state was evaluated outside the domain ball; carries the offending norm.
class DomainError : public Error {
public:
    DomainError(const std::string& what, double norm, double radius)
        : Error(what), norm_(norm), radius_(radius) {}
    double offending_norm() const { return norm_; }
    double radius() const { return radius_; }

private:
    double norm_;
    double radius_;
};

/// An operation precondition was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A non-finite state appeared while iterating; carries the step index.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::int64_t step) : Error(what), step_(step) {}
    std::int64_t step() const { return step_; }

private:
    std::int64_t step_;
};

/// Operation not defined for the requested scale mode.
class UnsupportedScaleError : public Error {
public:
    using Error::Error;
};

/// Iterative solver failed to reach tolerance; carries the last residual.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double residual)
        : Error(what), residual_(residual) {}
    double last_residual() const { return residual_; }

private:
    double residual_;
};

/// Singular Jacobian in a Newton step.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Request would exceed a fixed resource budget (grid too large, ...).
class ResourceError : public Error {
public:
    using Error::Error;
};

/// The Cauchy-doubling average estimator did not settle by the window cap.
class AveragingDivergenceError : public Error {
public:
    using Error::Error;
};

/// Model parameters violate a validity invariant.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure while writing artifacts.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace avgdiff
