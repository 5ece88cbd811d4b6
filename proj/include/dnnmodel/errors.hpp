#pragma once

#include <stdexcept>
#include <string>

namespace dnnmodel {

// Base for every error reported on bad user input. The CLI maps these to exit status 1.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ModelError {
 public:
  using ModelError::ModelError;
};

class ShapeError : public ModelError {
 public:
  using ModelError::ModelError;
};

class ConfigError : public ModelError {
 public:
  using ModelError::ModelError;
};

class OverflowError : public ModelError {
 public:
  using ModelError::ModelError;
};

}  // namespace dnnmodel
