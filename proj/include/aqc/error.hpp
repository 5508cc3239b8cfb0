#pragma once

#include <stdexcept>
#include <string>

namespace aqc {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong in aqc" catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// auto_truncation could not reach the requested tail tolerance below the cap.
class TruncationOverflow : public Error {
 public:
  using Error::Error;
};

// Eigensolver non-convergence, step-size underflow and similar.
class NumericError : public Error {
 public:
  using Error::Error;
};

class StiffnessError : public NumericError {
 public:
  using NumericError::NumericError;
};

// Atomic preparation with no closed solution for the given couplings.
class UnsupportedPreparation : public Error {
 public:
  using Error::Error;
};

// Field preparation violating an observable's precondition.
class InvalidPreparation : public Error {
 public:
  using Error::Error;
};

// g2 requested for a mode whose mean photon number is (numerically) zero.
class VanishingIntensity : public Error {
 public:
  using Error::Error;
};

class TooSparseSeries : public Error {
 public:
  using Error::Error;
};

// CSV input that does not follow the sweep schema; the message names the line.
class MalformedCsv : public Error {
 public:
  using Error::Error;
};

// Unreadable input or unwritable output file.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace aqc
