#pragma once

#include <stdexcept>
#include <string>

namespace vsloc {

/// Bad configuration value or malformed input file.  Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Unreadable or unwritable file.  Maps to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Internal numeric failure (non-finite intermediate, empty reduction).
/// Maps to exit code 4.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace vsloc
