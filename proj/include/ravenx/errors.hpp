#pragma once

#include <stdexcept>
#include <string>

namespace ravenx {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A JSON document is missing a field or has the wrong type. The message
/// names the offending field.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// A value violates a domain invariant (e.g. a PMF that does not sum to 1).
class InvariantError : public Error {
 public:
  using Error::Error;
};

/// A rule cannot produce a valid row / prediction for the requested
/// grid width and attribute range.
class FeasibilityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class StyleMismatchError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  using Error::Error;
};

class IdMismatchError : public Error {
 public:
  using Error::Error;
};

class EmptyInputError : public Error {
 public:
  using Error::Error;
};

/// Network-level failure talking to a chat-completion endpoint (retryable).
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The endpoint rejected our credentials; evaluation cannot continue.
class AuthError : public Error {
 public:
  using Error::Error;
};

}  // namespace ravenx
