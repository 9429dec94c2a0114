#pragma once

#include <stdexcept>
#include <string>

namespace speedbench {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input documents.
class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Geometry and speed plans. These are validation failures when they surface
// from a parsed config, so they share that base.
class DegenerateRoute : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class OverlappingSegments : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InvalidCount : public Error {
 public:
  using Error::Error;
};

// Simulation.
class SimEnded : public Error {
 public:
  using Error::Error;
};

class InvalidCommand : public Error {
 public:
  using Error::Error;
};

// Metrics and annotation.
class EmptyLog : public Error {
 public:
  using Error::Error;
};

class TraceTooShort : public Error {
 public:
  using Error::Error;
};

// Runner.
class IoError : public Error {
 public:
  using Error::Error;
};

class MissingLog : public Error {
 public:
  using Error::Error;
};

class ConfigMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace speedbench
