#pragma once

#include <stdexcept>
#include <string>

namespace freqseg {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument value or precondition violation.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// A label code outside the active schema.
class SchemaViolation : public Error {
 public:
  SchemaViolation(const std::string& what, long code) : Error(what), code_(code) {}
  long code() const noexcept { return code_; }

 private:
  long code_;
};

/// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Unsupported or malformed file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Payload shorter than the header promises.
class CorruptionError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// 3D reader given a 4D file or vice versa.
class DimensionalityError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Inputs that must share geometry or class count do not.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

/// Transform coefficients with inconsistent shapes.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Invalid ensemble or schema specification.
class SpecError : public Error {
 public:
  using Error::Error;
};

/// Statistic undefined for the selected voxel set.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

}  // namespace freqseg
