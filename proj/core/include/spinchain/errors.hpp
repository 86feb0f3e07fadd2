#pragma once

#include <stdexcept>
#include <string>

namespace spinchain {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text or bytes. The message carries the line or byte offset.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Graph invariant violations: self-loops, ids out of range, asymmetric adjacency,
// neighbor queries on isolated vertices, infeasible generator parameters.
class GraphError : public Error {
 public:
  using Error::Error;
};

// Parameters outside the documented domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// State space or parameter caps (oracle enumeration size, factory caps).
class CapExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace spinchain
