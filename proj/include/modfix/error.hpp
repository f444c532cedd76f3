#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modfix {

/// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Points of different dimension were combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value left the domain of the computation (NaN/inf coordinate, zero divisor).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Contraction constants violate their admissibility constraints.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with arguments outside its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Configuration rejected; `path()` is the JSON path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace modfix
