#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace upool {

// Precondition violated by a caller-supplied argument.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A numerical step produced a non-finite value.
class ComputationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text; line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error(line == 0 ? what
                                     : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Unknown command or flag on the command line.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace upool
