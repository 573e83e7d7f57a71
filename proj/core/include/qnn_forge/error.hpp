#pragma once

#include <stdexcept>
#include <string>

namespace qnn_forge {

/// Base class for every error raised by the library. The CLI maps the
/// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class InvalidObservableError : public Error {
 public:
  using Error::Error;
};

class UnknownVertexError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class IncompleteRunError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CorruptTraceError : public Error {
 public:
  using Error::Error;
};

/// Raised by topological sorting; carries one vertex that sits on a cycle.
class NotADagError : public Error {
 public:
  explicit NotADagError(int vertex)
      : Error("graph is not a DAG: vertex " + std::to_string(vertex) + " lies on a cycle"),
        vertex_(vertex) {}

  int vertex() const noexcept { return vertex_; }

 private:
  int vertex_;
};

}  // namespace qnn_forge
