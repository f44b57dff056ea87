#pragma once

#include "dirac/structure.hpp"

#include <Eigen/QR>

#include <cstdint>
#include <random>

namespace dirac::random {

// Seeded generators for random test instances. All draws go through one
// mt19937_64 so that a seed fixes every instance.

using Rng = std::mt19937_64;

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

inline Index uniform_int(Rng& rng, Index lo, Index hi) {
  return std::uniform_int_distribution<Index>(lo, hi)(rng);
}

inline Matrix matrix(Rng& rng, Index rows, Index cols) {
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = gaussian(rng);
  return m;
}

inline Matrix skew(Rng& rng, Index n) {
  const Matrix a = matrix(rng, n, n);
  return a - a.transpose();
}

inline double magnitude(Rng& rng) { return std::uniform_real_distribution<double>(0.5, 2.0)(rng); }

/// Haar-distributed orthogonal matrix.
inline Matrix orthogonal(Rng& rng, Index n) {
  if (n == 0) return Matrix(0, 0);
  const Eigen::HouseholderQR<Matrix> qr(matrix(rng, n, n));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Index j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

/// Random subspace of R^ambient of the given dimension (almost surely exact).
inline Subspace subspace(Rng& rng, Index ambient, Index dim) {
  if (dim == 0) return Subspace::zero(ambient);
  return Subspace::span_of(matrix(rng, ambient, dim));
}

inline Subspace subspace(Rng& rng, Index ambient) { return subspace(rng, ambient, uniform_int(rng, 0, ambient)); }

/// Linear map of the given rank whose nonzero singular values lie in [0.5, 2].
inline Matrix map(Rng& rng, Index rows, Index cols, Index rank) {
  const Matrix u = orthogonal(rng, rows), v = orthogonal(rng, cols);
  Vector sigma(rank);
  for (Index i = 0; i < rank; ++i) sigma(i) = magnitude(rng);
  return u.leftCols(rank) * sigma.asDiagonal() * v.leftCols(rank).transpose();
}

/// Skew matrix of random even rank; nonzero eigenvalues ±iλ with λ in [0.5, 2].
inline Matrix degenerate_skew(Rng& rng, Index n) {
  const Index pairs = uniform_int(rng, 0, n / 2);
  const Matrix q = orthogonal(rng, n);
  Matrix s = Matrix::Zero(n, n);
  for (Index i = 0; i < pairs; ++i) {
    const double l = magnitude(rng);
    s(2 * i, 2 * i + 1) = -l;
    s(2 * i + 1, 2 * i) = l;
  }
  return q * s * q.transpose();
}

inline LinearStructure dirac_from_pair(Rng& rng, Index n) {
  const Subspace f = subspace(rng, n);
  return from_pair(f, TwoForm(degenerate_skew(rng, n)));
}

inline LinearStructure dirac_from_bivector(Rng& rng, Index n) {
  const Subspace c = subspace(rng, n);
  return from_bivector(Bivector(degenerate_skew(rng, n)), c);
}

inline LinearStructure dirac(Rng& rng, Index n) {
  return uniform_int(rng, 0, 1) == 0 ? dirac_from_pair(rng, n) : dirac_from_bivector(rng, n);
}

/// Random subspace of a random Dirac structure.
inline LinearStructure isotropic(Rng& rng, Index n) {
  const LinearStructure d = dirac(rng, n);
  const Index k = uniform_int(rng, 0, n);
  if (k == 0) return LinearStructure(Subspace::zero(2 * n));
  return LinearStructure(Subspace::span_of(d.span().basis() * matrix(rng, n, k)));
}

inline LinearStructure coisotropic(Rng& rng, Index n) { return pairing_orthogonal(isotropic(rng, n)); }

}  // namespace dirac::random
