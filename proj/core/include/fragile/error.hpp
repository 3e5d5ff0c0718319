#pragma once

#include <stdexcept>
#include <string>

namespace fragile {

// Base of every exception raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Plane dimensions are incompatible (not a multiple of 8, mismatched shapes).
class ShapeError : public Error {
 public:
  using Error::Error;
};

// An argument is outside its documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A statistic is undefined for the input, e.g. correlation of a constant plane.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Series truncation, solver iteration caps and similar numerical failures.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Raised before any computation when an experiment manifest is invalid.
class ManifestError : public Error {
 public:
  using Error::Error;
};

}  // namespace fragile
