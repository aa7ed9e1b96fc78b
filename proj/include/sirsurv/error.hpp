#pragma once

#include <stdexcept>
#include <string>

namespace sirsurv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: parameters, configs, flags. The CLI maps these to exit 1.
class ValidationError : public Error {
public:
  ValidationError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

/// Config text that is not well-formed JSON.
class ParseError : public Error {
public:
  ParseError(std::size_t line, std::size_t column, const std::string& what)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

private:
  std::size_t line_;
  std::size_t column_;
};

class InvalidStateError : public Error {
public:
  using Error::Error;
};

/// Integration produced a non-finite state.
class DivergedError : public Error {
public:
  DivergedError(double t, const std::string& what)
      : Error(what + " (t = " + std::to_string(t) + ")"), time_(t) {}

  double time() const noexcept { return time_; }

private:
  double time_;
};

/// A threshold quantity whose denominator vanishes.
class UndefinedThresholdError : public Error {
public:
  using Error::Error;
};

class DomainError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace sirsurv
