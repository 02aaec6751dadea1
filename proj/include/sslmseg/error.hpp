#pragma once

#include <stdexcept>
#include <string>

namespace sslmseg {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed file contents (bad magic, unsupported encoding, unparsable token).
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class InputTooShortError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// Artifact produced under a different pipeline configuration.
class CompatibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace sslmseg
