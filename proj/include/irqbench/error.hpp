#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace irqbench {

// Base of everything this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration: interrupt specs, scenarios, timing models, patterns.
class ConfigError : public Error {
public:
  using Error::Error;
};

// A call that violates the current interrupt-controller state
// (unknown id, time regression, EOI of a non-active interrupt).
class StateError : public Error {
public:
  using Error::Error;
};

// Malformed trace stream. offset() is the byte position of the problem.
class TraceFormatError : public Error {
public:
  TraceFormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

}  // namespace irqbench
