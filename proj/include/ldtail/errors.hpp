#pragma once

#include <stdexcept>
#include <string>

namespace ldtail {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A natural parameter lies outside the model's open natural-parameter domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A mean target (or probability) lies outside its admissible open range.
class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The tilt is too close to zero for the c_mu correction to be meaningful.
class DegenerateTiltError : public Error {
 public:
  using Error::Error;
};

/// n * mu is not a point of the sum lattice of a lattice-valued model.
class LatticeAlignmentError : public Error {
 public:
  using Error::Error;
};

/// The shifted mean mu - c/n left the open interval (base mean, supremum).
class ShiftError : public Error {
 public:
  using Error::Error;
};

class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Malformed model specification or invalid model parameters.
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace ldtail
