#pragma once

#include <stdexcept>
#include <string>

namespace plm {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or semantically invalid input: schema, structure, query, data
/// file contents, command line arguments.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A file or directory could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace plm
