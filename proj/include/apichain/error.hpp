#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace apichain {

/// Raised for malformed or inconsistent input data (exit code 2 in the CLI).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, std::string text, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what + ": '" + text + "'"),
        line_(line),
        text_(std::move(text)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& text() const noexcept { return text_; }

 private:
  std::size_t line_;
  std::string text_;
};

}  // namespace apichain
