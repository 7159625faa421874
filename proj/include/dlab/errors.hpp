#pragma once

#include <stdexcept>
#include <string>

namespace dlab {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical / domain failures (CLI exit code 2).
struct OutOfRangeError : Error {
  using Error::Error;
};
struct OutsideDomainError : Error {
  using Error::Error;
};
struct OrbitDivergedError : Error {
  long step;
  OrbitDivergedError(long s, const std::string& what) : Error(what), step(s) {}
};
struct IncompatibleParityError : Error {
  using Error::Error;
};
struct DegenerateScaleError : Error {
  using Error::Error;
};
struct NoConvergenceError : Error {
  using Error::Error;
};

// Usage / configuration failures (CLI exit code 1).
struct ConfigError : Error {
  using Error::Error;
};
struct ParseError : ConfigError {
  int line;
  ParseError(int l, const std::string& reason)
      : ConfigError("config parse error at line " + std::to_string(l) + ": " + reason), line(l) {}
};
struct InvariantViolationError : ConfigError {
  using ConfigError::ConfigError;
};

}  // namespace dlab
