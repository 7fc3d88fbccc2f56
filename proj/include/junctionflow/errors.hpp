#pragma once

#include <stdexcept>
#include <string>

namespace jf {

// Base of every error thrown by the library. The CLI maps each subclass to
// a distinct process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid user input: malformed configuration, argument outside its domain.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Arguments that violate an operation's precondition (for example a query
// point outside the box).
class DomainError : public Error {
 public:
  using Error::Error;
};

// A time step that fails one of the CFL gates.
class CflError : public Error {
 public:
  using Error::Error;
};

// Something that should be impossible happened (non-finite value, state
// leaving the stability box, wave speed with the wrong sign).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace jf
