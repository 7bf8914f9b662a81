#pragma once

#include <stdexcept>
#include <string>

namespace dpspectra {

/// Malformed input file (Matrix Market / CSV). Carries a line number when known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
  ParseError(const std::string& what, long line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")") {}
};

/// Numerical failure: non-convergence, degenerate iterate, overflow.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dpspectra
