#pragma once

#include <stdexcept>
#include <string>

namespace thermoarena {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// weather
class MalformedHeader : public Error {
 public:
  using Error::Error;
};

class ShortRow : public Error {
 public:
  ShortRow(std::size_t row, std::size_t fields, std::size_t required)
      : Error("EPW row " + std::to_string(row) + " has " + std::to_string(fields) +
              " fields, need at least " + std::to_string(required)),
        row(row) {}
  std::size_t row;
};

class NonNumericField : public Error {
 public:
  NonNumericField(std::size_t row, std::size_t column, const std::string& text)
      : Error("non-numeric field '" + text + "' at row " + std::to_string(row) + ", column " +
              std::to_string(column)),
        row(row),
        column(column) {}
  std::size_t row;
  std::size_t column;
};

// building
class UnknownPreset : public Error {
 public:
  explicit UnknownPreset(const std::string& id) : Error("unknown building preset '" + id + "'") {}
};

class InvalidSetpoints : public Error {
 public:
  using Error::Error;
};

// env
class SteppedAfterDone : public Error {
 public:
  SteppedAfterDone() : Error("step() called on a finished episode; call reset() first") {}
};

/// Invalid configuration. `field` is the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field(std::move(field)) {}
  std::string field;
};

// drl
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class NotEnoughSamples : public Error {
 public:
  using Error::Error;
};

class RolloutTooShort : public Error {
 public:
  using Error::Error;
};

}  // namespace thermoarena
