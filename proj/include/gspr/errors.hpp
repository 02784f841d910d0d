#pragma once

#include <stdexcept>
#include <string>

namespace gspr {

/// Invalid configuration or malformed input (dimension mismatch, out-of-range
/// parameter, unsorted sample). The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical procedure could not produce a trustworthy result (singular
/// diagonal, no root of the reserve equation). The CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace gspr
