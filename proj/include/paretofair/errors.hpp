#pragma once

#include <stdexcept>
#include <string>

namespace paretofair {

// Malformed configuration: spec/schema files, out-of-range knobs, resource
// limits. Mapped to CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent data: bad CSV cells, unknown categories,
// impossible stratification. Mapped to CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation degenerated: infinite risk, underflowed density, divergent
// training, exhausted sampling budget. Mapped to CLI exit code 4.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace paretofair
