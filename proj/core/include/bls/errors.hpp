#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bls {

// Training produced a non-finite loss, gradient, or parameter.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based; 0 when not line-oriented.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Operation invoked in a state its contract does not allow.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace bls
