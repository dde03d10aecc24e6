#pragma once

#include <stdexcept>
#include <string>

namespace sodacer {

// Integrator produced NaN/Inf state components.
struct NonFiniteState : std::runtime_error {
    explicit NonFiniteState(const std::string& what) : std::runtime_error(what) {}
};

// Control-effort integrand diverges at or beyond the saturation limit.
struct SaturationBoundary : std::runtime_error {
    explicit SaturationBoundary(const std::string& what) : std::runtime_error(what) {}
};

// Cluster count exceeded the configured safety cap; hyperparameters are degenerate.
struct ClusterCapacityExceeded : std::runtime_error {
    explicit ClusterCapacityExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Sampling requested from a replay structure with no content.
struct EmptyReplay : std::runtime_error {
    explicit EmptyReplay(const std::string& what) : std::runtime_error(what) {}
};

// Optimizer produced NaN/Inf (expected in verbatim second-moment mode).
struct NonFiniteUpdate : std::runtime_error {
    explicit NonFiniteUpdate(const std::string& what) : std::runtime_error(what) {}
};

// Configuration file/override could not be parsed or violates an invariant.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sodacer
