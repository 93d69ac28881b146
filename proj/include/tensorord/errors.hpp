#pragma once

#include <stdexcept>
#include <string>

namespace tensorord {

// Precondition or shape violation in a caller-supplied argument.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Iterative numerical routine failed (e.g. eigensolver did not converge).
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed file contents.
class FormatError : public std::runtime_error {
 public:
  explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tensorord
