#pragma once

#include <stdexcept>
#include <string>

namespace anovacheb {

/// Malformed or out-of-contract input data (bad file contents, coordinates
/// outside [-1,1], dimension mismatches between containers).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical failure: non-convergence past the iteration cap, a failed
/// adjoint consistency probe, degenerate zero-variance input.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Request exceeds a documented size cap (coefficient memory, dense
/// diagnostic dimensions).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace anovacheb
