#pragma once

#include <stdexcept>
#include <string>

namespace graspctl {

// Invalid configuration or scenario input, detected before any simulation runs.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Failure while the simulation is running (non-finite state, sensor fault).
class RuntimeFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace graspctl
