#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace atlas {

// Base of every error raised by the library. Callers that only need a
// diagnostic can catch this; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::string source, std::size_t line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}

  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input data that is well-formed but inconsistent (e.g. partial labelings).
class InputError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class ConnectivityError : public Error {
 public:
  using Error::Error;
};

class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

// Transport-level failure; safe to retry. status() is 0 when no HTTP
// response was received at all.
class FetchError : public Error {
 public:
  FetchError(const std::string& what, int status)
      : Error(what), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

}  // namespace atlas
