#pragma once

#include <stdexcept>
#include <string>

namespace lmgeo {

// Bad caller-supplied data (negative delay, empty page, mismatched ids...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid configuration or inconsistent dimensions.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed file contents; the message carries the line number.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Target unknown to the measurement source.
class MeasurementError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Degenerate scoring input: nothing usable to rank candidates with.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GeolocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lmgeo
