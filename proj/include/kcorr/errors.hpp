#pragma once

#include <stdexcept>
#include <string>

namespace kcorr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments, dimension mismatches, out-of-domain points.
class InputError : public Error {
 public:
  using Error::Error;
};

// A kernel variance that should be positive is zero or negative.
class DegenerateVarianceError : public Error {
 public:
  using Error::Error;
};

// Calibration targets outside the solvable region, or limit cases that diverge.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

// Exact enumeration would exceed the configured size.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class InternalConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace kcorr
