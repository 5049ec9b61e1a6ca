#pragma once

#include <stdexcept>
#include <string>

namespace hpgo {

// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Logarithm requested for a rotation at or numerically near angle pi,
// where the principal axis-angle representation is not stable.
struct AngleAtPiError : Error {
  using Error::Error;
};

// A node id was inserted twice into the same graph.
struct DuplicateNodeError : Error {
  using Error::Error;
};

// An edge references a node id that is not present in the graph.
struct MissingEndpointError : Error {
  using Error::Error;
};

// An information matrix is not symmetric positive semidefinite.
struct InvalidInformationError : Error {
  using Error::Error;
};

// A text line could not be parsed; carries the 1-based line number.
struct MalformedLineError : Error {
  MalformedLineError(int line, const std::string& msg)
      : Error("line " + std::to_string(line) + ": " + msg), line_number(line) {}
  int line_number;
};

// An operation that needs at least one edge was given a graph without any.
struct EmptyGraphError : Error {
  using Error::Error;
};

// A group move was requested for a node that is not alone in its group.
struct NotSingletonError : Error {
  using Error::Error;
};

// A node has no group assignment where one is required.
struct UnassignedNodeError : Error {
  using Error::Error;
};

// A traversal seed is not a node of the graph.
struct MissingSeedError : Error {
  using Error::Error;
};

// The free set spans a connected component with no fixed node to pin
// the gauge freedom.
struct NoFixedGaugeError : Error {
  using Error::Error;
};

// The damped normal-equation matrix is not positive definite.
struct NotPositiveDefiniteError : Error {
  using Error::Error;
};

// Two trajectories do not share the same node id set.
struct MismatchedIdsError : Error {
  using Error::Error;
};

// The ground-truth path is shorter than the largest evaluation segment.
struct PathTooShortError : Error {
  using Error::Error;
};

}  // namespace hpgo
