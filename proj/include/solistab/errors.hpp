#pragma once
#include <stdexcept>
#include <string>

namespace solistab {

// Invalid parameters, malformed configuration, contract violations by the
// caller.  Mapped to exit code 2 by the CLI.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric failure at runtime (blow-up, non-convergence, singular systems).
// Mapped to exit code 3 by the CLI.
struct ComputeError : std::runtime_error {
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace solistab
