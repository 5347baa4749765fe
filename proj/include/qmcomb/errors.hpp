#pragma once

#include <stdexcept>
#include <string>

namespace qmcomb {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

// Numeric failures that the caller can usually fix by refining inputs.
class NumericError : public Error {
 public:
  using Error::Error;
};

class NearSingular : public NumericError {
 public:
  using NumericError::NumericError;
};

class PoleError : public NumericError {
 public:
  using NumericError::NumericError;
};

class GridTooCoarse : public NumericError {
 public:
  using NumericError::NumericError;
};

class ContractViolation : public NumericError {
 public:
  using NumericError::NumericError;
};

class NoSolution : public NumericError {
 public:
  using NumericError::NumericError;
};

class WindowTooShort : public NumericError {
 public:
  using NumericError::NumericError;
};

class InvalidStep : public NumericError {
 public:
  using NumericError::NumericError;
};

// File and format problems (missing file, malformed JSON, bad schema).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace qmcomb
