#pragma once

#include <stdexcept>
#include <string>

namespace rpsim {

/// Invalid input: bad configuration, schema violation, violated precondition.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computed object failed one of its invariants.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure did not reach its requested accuracy.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rpsim
