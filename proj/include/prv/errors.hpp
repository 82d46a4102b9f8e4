#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace prv {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed input file. line/column are 1-based; 0 means unknown.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
      : Error(line == 0 ? what
                        : what + " (line " + std::to_string(line) + ", column " +
                              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ImageDecodeError : public FormatError {
 public:
  using FormatError::FormatError;
};

class FitFailure : public Error {
 public:
  using Error::Error;
};

// Instance exceeds an exact solver's size cap.
class TooLarge : public Error {
 public:
  using Error::Error;
};

}  // namespace prv
