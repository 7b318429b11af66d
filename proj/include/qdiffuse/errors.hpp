#pragma once

#include <stdexcept>
#include <string>

namespace qdiffuse {

// The three families map onto CLI exit codes 1, 2 and 3.

/// Invalid user input: graph documents, scenario files, CLI arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A failure inside the quantum or classical engine (bad dimensions,
/// non-unitary operators, protocol misuse, size limits).
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A runtime check of a model invariant failed, e.g. the selected edges of
/// some basis term do not form a matching.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class GraphErrorKind {
  Malformed,
  EmptyVertexSet,
  InvalidVertexName,
  DuplicateVertex,
  UnknownVertex,
  SelfLoop,
  DuplicateEdge,
  NotAnEdge,
  InvalidSize,
};

class GraphError : public ConfigError {
 public:
  GraphError(GraphErrorKind kind, const std::string& what)
      : ConfigError(what), kind_(kind) {}

  GraphErrorKind kind() const noexcept { return kind_; }

 private:
  GraphErrorKind kind_;
};

/// Calling protocol stages out of order, or on registers in the wrong state.
class ProtocolError : public EngineError {
 public:
  using EngineError::EngineError;
};

}  // namespace qdiffuse
