#pragma once

#include <stdexcept>
#include <string>

namespace qsflat {

// Requested jet order is not stored, or a point does not cover a
// function's declared arity. Missing variables are an error, never
// an implicit zero.
class JetRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Left the valid chart or hit a singular configuration / singular
// Jacobian along a solve path.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative solver failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Model definition is inconsistent (bad parameterization, residual
// above tolerance, failed structural check).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qsflat
