#pragma once

#include <stdexcept>
#include <string>

namespace pairmn {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A parameter or input violates its documented domain.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// Input is syntactically valid but statistically unusable
// (all-zero counts, zero-variance data, unit totals, ...).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

// Fewer samples than the estimator or test requires.
class InsufficientSamples : public Error {
 public:
  using Error::Error;
};

// Fewer p-values than the combination rule requires.
class InsufficientTests : public Error {
 public:
  using Error::Error;
};

// Every eigenvalue was truncated; no invertible subspace remains.
class ZeroRank : public Error {
 public:
  using Error::Error;
};

// Node table does not describe a single rooted tree.
class InvalidTree : public Error {
 public:
  using Error::Error;
};

// Operation requested on a node of the wrong kind (e.g. slicing a leaf).
class InvalidNode : public Error {
 public:
  using Error::Error;
};

// A subtree report with no testable nodes.
class EmptyReport : public Error {
 public:
  using Error::Error;
};

// File could not be parsed; message carries the line number.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace pairmn
