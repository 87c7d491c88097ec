#pragma once

#include <stdexcept>
#include <string>

namespace sandpile_lab {

// Bad user input: unknown state, invalid letter, malformed ray spec.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An object could not be built (non-invertible automaton, disconnected graph).
class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A request exceeds the configured work limits.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The level is not in the valid subsequence for the requested exhaustion.
class InvalidLevelError : public std::runtime_error {
 public:
  InvalidLevelError(const std::string& what, int nearest)
      : std::runtime_error(what), nearest_valid(nearest) {}
  int nearest_valid;
};

}  // namespace sandpile_lab
