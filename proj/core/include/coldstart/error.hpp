#pragma once

#include <stdexcept>
#include <string>

namespace coldstart {

// Base class for every failure raised by the library. Callers that only need
// to report the problem can catch this; tests match on the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on caller-supplied arguments was violated.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent data read from disk or from the network.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace coldstart
