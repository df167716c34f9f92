#pragma once

#include <stdexcept>
#include <string>

namespace reflexgrip {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

// tactile sensors
class NonMonotoneLocationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class MissingProbeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class OutOfRangeLocation : public Error {
 public:
  using Error::Error;
};

// reflex control
class InsufficientHistory : public Error {
 public:
  using Error::Error;
};

class NonMonotoneTime : public Error {
 public:
  using Error::Error;
};

// haptic encoding
class OutOfRange : public Error {
 public:
  using Error::Error;
};

class VoltageOutOfRange : public Error {
 public:
  using Error::Error;
};

// plant
class InvalidTick : public Error {
 public:
  using Error::Error;
};

// metrics
class EmptyInput : public Error {
 public:
  using Error::Error;
};

class BinMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace reflexgrip
