#pragma once

#include <stdexcept>
#include <string>

namespace mcaimem {

// Base for every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a model (voltage, probability, time, address).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Anchor sets that admit no positive-parameter retention fit.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Malformed input data (topology rows, traces, manifests, snapshots).
class ParseError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mcaimem
