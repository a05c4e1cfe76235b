#pragma once

#include <stdexcept>
#include <string>

namespace hotplate {

/// Scenario/configuration problems (bad keys, units, unresolved presets).
/// The CLI maps these to exit code 2.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Geometry construction and voxelization failures (overlaps, resolution,
/// disconnected conductors). Treated as configuration problems by the CLI.
struct geometry_error : std::runtime_error {
    explicit geometry_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical solver failures (singular systems, non-convergence).
/// The CLI maps these to exit code 3.
struct solver_error : std::runtime_error {
    explicit solver_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hotplate
