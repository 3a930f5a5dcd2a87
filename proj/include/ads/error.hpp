#pragma once

#include <stdexcept>
#include <string>

namespace ads {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input data that does not conform to its declared schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

// A well-formed field holding a value its spec does not allow, such as
// an undeclared category.
class ValueError : public SchemaError {
 public:
  using SchemaError::SchemaError;
};

// Malformed or unknown configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ads
