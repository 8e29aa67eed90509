#pragma once

#include <stdexcept>
#include <string>

namespace bandedge {

/// Raised when an input record violates a physical invariant (wrong-sign
/// curvature for an in-gap detuning, non-finite values, mismatched lengths).
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure (root bracketing, integration,
/// renormalized products) fails to produce a trustworthy result.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw InvalidParameter(message);
}

} // namespace detail

} // namespace bandedge
