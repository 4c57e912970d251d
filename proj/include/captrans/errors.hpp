#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace captrans {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (instance files, solution files, LP files).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An instance or command violates one or more invariants. All violations are collected.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed:";
    for (const auto& s : v) {
      out += "\n  - ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

/// Solver-side failure: numerical breakdown, limits exceeded, infeasible vectors.
class SolverError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace captrans
