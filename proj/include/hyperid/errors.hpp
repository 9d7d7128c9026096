#pragma once

#include <stdexcept>
#include <string>

namespace hyperid {

// Precondition violations use std::invalid_argument directly.

/// Raised when an unregularized (lambda = 0) regression has a rank-deficient
/// regressor matrix.
class SingularProblemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when the integrator produces a non-finite state.
class IntegrationDivergedError : public std::runtime_error {
public:
    IntegrationDivergedError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

}  // namespace hyperid
