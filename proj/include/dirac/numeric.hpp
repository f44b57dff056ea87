#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dirac {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Tolerances shared by every numeric routine in the library.
///
/// `rank_rel_tol` decides the numerical rank of a matrix (singular values at or
/// below `rank_rel_tol * sigma_max` are treated as zero). `equal_tol` is the
/// absolute Frobenius-norm threshold used when two subspaces are compared
/// through their orthogonal projectors.
struct NumericPolicy {
  double rank_rel_tol = 1e-10;
  double equal_tol = 1e-9;
};

/// Process-wide policy. Adjust before running computations; it is read, never
/// written, by the library itself.
inline NumericPolicy& numeric_policy() {
  static NumericPolicy policy;
  return policy;
}

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation needs a structure of a particular class (Dirac,
/// isotropic, coisotropic) and receives something else.
class ClassError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

inline std::string dims_str(Index a, Index b) {
  return std::to_string(a) + " vs " + std::to_string(b);
}

}  // namespace dirac
