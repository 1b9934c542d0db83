/// @file errors.hpp
/// @brief Exception hierarchy shared by all modules.
///
/// The CLI maps these onto exit codes: NumericalAbort -> 1, ConfigError -> 2,
/// IoError -> 3. DomainError and InsufficientData are programming or input
/// errors raised by the numerical layers and surface as exit code 1.
#pragma once

#include <stdexcept>
#include <string>

namespace nsk {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Pointwise precondition violated, e.g. a nonpositive density.
struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time integration stopped: CFL breach or density floor violation.
struct NumericalAbort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace nsk
