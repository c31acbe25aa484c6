#pragma once

#include <stdexcept>
#include <string>

namespace pdm {

// Exit codes used by the command-line driver.
enum class ExitCode : int {
  ok = 0,
  usage = 2,
  data = 3,
  numerical = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
  virtual const char* kind() const noexcept = 0;
};

// Bad arguments, bad configuration, violated preconditions.
class UsageError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::usage; }
  const char* kind() const noexcept override { return "usage"; }
};

// Malformed or structurally inconsistent input data.
class DataError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::data; }
  const char* kind() const noexcept override { return "data"; }
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numerical; }
  const char* kind() const noexcept override { return "numerical"; }
};

}  // namespace pdm
