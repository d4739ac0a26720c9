#pragma once

#include <stdexcept>
#include <string>

namespace calr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (shape, range, empty input).
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// A file could not be read or written, or its contents are malformed.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace calr
