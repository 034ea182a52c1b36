#pragma once

#include <stdexcept>
#include <string>

namespace signalkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Inputs with inconsistent shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller or callback broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class InvalidScheme : public Error {
 public:
  using Error::Error;
};

// Enumeration or allocation guard tripped (net size, dense game size).
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace signalkit
