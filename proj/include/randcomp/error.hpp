#pragma once

#include <stdexcept>
#include <string>

namespace randcomp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A probability row is negative or does not sum to one.
class NormalizationError : public Error {
 public:
  using Error::Error;
};

/// Dangling references, incomplete tables, duplicate ids.
class StructureError : public Error {
 public:
  using Error::Error;
};

class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class SourceNotFound : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class Overflow : public Error {
 public:
  using Error::Error;
};

class InvalidSplit : public Error {
 public:
  using Error::Error;
};

class InvalidRange : public Error {
 public:
  using Error::Error;
};

class SearchCapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace randcomp
