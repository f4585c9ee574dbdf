#pragma once

#include <stdexcept>
#include <string>

namespace tvor {

// Bad inputs: malformed files, parameter domain violations, inconsistent bins.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Degenerate regression design (all sizes equal, or fewer than two distinct
// positive sizes).
class RankDeficientError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Refusals from numerical guards: oracle outcome-count explosion, zero
// Monte Carlo standard deviation, RANSAC consensus failure.
class NumericalGuardError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace tvor
