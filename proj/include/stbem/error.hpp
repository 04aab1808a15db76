#pragma once

#include <stdexcept>
#include <string>

namespace stbem {

/// Invalid input: bad parameters, malformed configuration, unsupported
/// combination of options. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine could not deliver its contract (singular block,
/// non-finite quadrature value, ...). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace stbem
