#pragma once

#include <stdexcept>
#include <string>

namespace dts {

/// Base class for every error raised by the solver library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidOrderError : public Error { using Error::Error; };
class DimensionError : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class InsufficientDissipationError : public Error { using Error::Error; };
class NegativeViscosityError : public Error { using Error::Error; };
class InvariantViolationError : public Error { using Error::Error; };
class PositivityDeadlockError : public Error { using Error::Error; };
class UnsupportedConfigurationError : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class InsufficientSweepError : public Error { using Error::Error; };

/// Raised when a state leaves the admissible set. `element` / `node` are -1
/// when the state is not attached to a mesh location.
class InadmissibleStateError : public Error {
public:
  InadmissibleStateError(const std::string& what, int element = -1, int node = -1)
      : Error(what + (element >= 0 ? " (element " + std::to_string(element) + ", node " +
                                         std::to_string(node) + ")"
                                   : std::string{})),
        element_(element), node_(node) {}
  int element() const { return element_; }
  int node() const { return node_; }

private:
  int element_;
  int node_;
};

}  // namespace dts
