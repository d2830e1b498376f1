#pragma once

#include <stdexcept>
#include <string>

namespace tunnelsplit {

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Unsupported : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Probability leaked off the spatial grid beyond tolerance.
class GridLeakError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ZeroNormError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace tunnelsplit
