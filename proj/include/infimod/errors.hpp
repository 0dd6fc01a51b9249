#pragma once

#include <stdexcept>
#include <string>

namespace infimod {

/// Bad discretization / option values (odd N, epsilon above cap, ...).
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid data fed to an operation (non-finite samples, zero mass, ...).
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Floating-point trouble inside a computation (overflowing exponent,
/// non-finite integrand sample), with the offending location in the message.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The compatibility condition m(z0) < 1 + inf m failed somewhere a series
/// log needed it.
struct CompatibilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iteration did not converge. `stage` identifies which estimate broke
/// (gamma bracket vs. Picard contraction): the analytic threshold is a single
/// non-constructive epsilon, detected at runtime.
struct ConvergenceError : std::runtime_error {
    std::string stage;
    ConvergenceError(std::string stage_, const std::string& what_)
        : std::runtime_error(what_), stage(std::move(stage_)) {}
};

} // namespace infimod
