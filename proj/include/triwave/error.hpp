#pragma once

#include <stdexcept>
#include <string>

namespace triwave {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value violates a documented precondition or type invariant.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two fields (or a field and a parameter set) live on different grids.
class GridMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// The fiber root could not be bracketed in representable range.
class IllConditioned : public Error {
 public:
  using Error::Error;
};

/// Every restart of a ground-state solve collapsed towards zero.
class CollapsedToZero : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidArgument(message);
}

}  // namespace detail
}  // namespace triwave
