#pragma once

#include <stdexcept>
#include <string>

namespace dflrb {

// Invalid static data or configuration: bad dimensions at construction,
// malformed config/preset/CSV input, unknown names. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure at runtime: solver non-convergence, singular KKT system,
// non-finite gradients, undefined metric denominators. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace dflrb
