#pragma once

#include <stdexcept>
#include <string>

namespace usf {

/// Bad input: malformed graph, vertex out of range, violated precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configured size limit (vertex cap, enumeration cap) would be exceeded.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Sampling requested on a graph that is not connected.
class DisconnectedGraphError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A sampler gave up (walk-length valve, rejection cap).
class SamplingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace usf
