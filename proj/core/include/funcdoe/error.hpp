#pragma once

#include <stdexcept>
#include <string>

namespace funcdoe {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument: sizes, ranges, orders, flags.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Two runs coincide, so a space-filling criterion is undefined.
class DegenerateDesignError : public Error {
 public:
  using Error::Error;
};

// Correlation matrix could not be factorized even after jitter escalation.
class IllConditionedError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace funcdoe
