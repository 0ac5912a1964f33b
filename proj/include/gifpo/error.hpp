#pragma once

#include <stdexcept>
#include <string>

namespace gifpo {

/// Library error with a stable, machine-readable diagnostic code.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Error raised while reading one of the text formats (GNL, FPD, stimulus).
/// Line and column are 1-based; column 0 means "whole line".
class ParseError : public Error {
 public:
  ParseError(std::string code, const std::string& message, int line, int column)
      : Error(code, format(code, message, line, column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& code, const std::string& message,
                            int line, int column) {
    std::string s = std::to_string(line) + ":" + std::to_string(column) +
                    ": error[" + code + "]: " + message;
    return s;
  }

  int line_;
  int column_;
};

}  // namespace gifpo
