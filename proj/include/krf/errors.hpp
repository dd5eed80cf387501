#pragma once

#include <stdexcept>
#include <string>

namespace krf {

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when an eigenvalue field fails metric positivity. Carries the first
// offending node index.
class NonKahlerError : public Error {
public:
  NonKahlerError(const std::string& msg, int node)
      : Error(msg + " (node " + std::to_string(node) + ")"), node_(node) {}
  int node() const { return node_; }

private:
  int node_;
};

class InsufficientResolutionError : public Error {
public:
  using Error::Error;
};

class InvalidDefiningFunctionError : public Error {
public:
  using Error::Error;
};

class UnsupportedDimensionError : public Error {
public:
  using Error::Error;
};

class SolverFailure : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace krf
