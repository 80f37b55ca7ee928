#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssm {

/// Argument outside an operation's mathematical domain (zero inverse,
/// duplicate interpolation nodes, unknown logical id, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid or unsatisfiable configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical share memory or a stash ran out of room.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StashOverflow : public CapacityError {
 public:
  using CapacityError::CapacityError;
};

/// Malformed trace input; `line()` is 1-based.
class TraceError : public std::runtime_error {
 public:
  TraceError(std::uint64_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::uint64_t line() const noexcept { return line_; }

 private:
  std::uint64_t line_;
};

}  // namespace ssm
