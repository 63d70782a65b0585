#pragma once

#include <stdexcept>
#include <string>

namespace ctiv {

// Every error the library raises derives from Error so callers (the CLI in
// particular) can map families of failures to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input bytes do not follow the expected wire format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A column map, option set or grammar is internally inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Attribute name outside the record schema.
class UnknownAttributeError : public Error {
 public:
  using Error::Error;
};

// Caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Encoder spec / model applied to data of a different shape.
class SpecMismatchError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class EmptyVocabularyError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

}  // namespace ctiv
