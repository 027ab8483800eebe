#pragma once

#include <stdexcept>
#include <string>

namespace chirpsep {

// Invalid scenario, plan, or tool configuration. Maps to CLI exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised when band selection leaves no in-band points. Maps to CLI exit code 3.
struct NoSignalError : std::runtime_error {
  explicit NoSignalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chirpsep
