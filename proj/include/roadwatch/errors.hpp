#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace roadwatch {

// Payload or record has the wrong shape (length, header, field layout).
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value is out of its documented range.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A text record could not be parsed; carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Timestamps went backwards (or stood still) on an ordered stream.
class StreamOrderError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke an operation precondition (e.g. dt <= 0).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Configuration value rejected; `field` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Internal consistency check failed (maps to CLI exit code 3).
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace roadwatch
