#pragma once

#include <stdexcept>
#include <string>

namespace ratchet {

/// Bad argument or violated precondition.
class InvalidInputError : public std::invalid_argument {
public:
    explicit InvalidInputError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Unscaled exponentials would overflow; use the rescaling code paths.
class OverflowRiskError : public std::runtime_error {
public:
    explicit OverflowRiskError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A linear solve or iteration failed in a way that is not expected for valid inputs.
class NumericalFailureError : public std::runtime_error {
public:
    explicit NumericalFailureError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An internal invariant broke (signals a bug, not a user error).
class InternalConsistencyError : public std::logic_error {
public:
    explicit InternalConsistencyError(const std::string& msg) : std::logic_error(msg) {}
};

/// Interpolated density too small to divide by.
class DegenerateDensityError : public std::runtime_error {
public:
    explicit DegenerateDensityError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Least-squares basis too ill-conditioned to trust.
class IllConditionedFitError : public std::runtime_error {
public:
    explicit IllConditionedFitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ratchet
