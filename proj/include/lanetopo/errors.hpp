#pragma once

#include <stdexcept>
#include <string>

namespace lanetopo {

// Failures that the command-line layer maps to distinct exit codes.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace lanetopo
