#pragma once

#include <stdexcept>
#include <string>

namespace recest {

/// Normalizer matrix has a pivot at or below the singularity threshold.
/// Callers decide whether to skip the update or abort.
class SingularMatrixError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The estimating function or the update increment produced NaN/Inf.
/// Signals model misuse rather than an internal bug.
class NonFiniteUpdateError : public std::runtime_error {
public:
    NonFiniteUpdateError(long t, const std::string& what)
        : std::runtime_error("non-finite update at t=" + std::to_string(t) + ": " + what), t_(t) {}
    long step() const noexcept { return t_; }

private:
    long t_ = 0;
};

/// A diagnostic needs a closed-form conditional drift the scheme does not provide.
class MissingDriftError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive quadrature did not converge within the refinement depth limit.
class MaxDepthError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough replications or checkpoints for a stable estimate.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace recest
