#pragma once

#include <stdexcept>
#include <string>

namespace wmp {

// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A model or argument failed validation (bad probability sums, dangling ids,
// violated preconditions, ...).
struct ValidationError : Error {
  using Error::Error;
};

// The input is valid but outside what an operation supports.
struct UnsupportedError : Error {
  using Error::Error;
};

// Text input could not be parsed. `line` is 1-based, 0 when unknown.
struct ParseError : Error {
  ParseError(int line_, const std::string& what)
      : Error(line_ > 0 ? "line " + std::to_string(line_) + ": " + what : what),
        line(line_) {}
  int line = 0;
};

// An instance exceeds a configured size or iteration cap.
struct SizeCapError : Error {
  using Error::Error;
};

// Bad command-line usage.
struct UsageError : Error {
  using Error::Error;
};

// A broken internal invariant; indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

}  // namespace wmp
