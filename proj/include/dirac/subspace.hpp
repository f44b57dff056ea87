#pragma once

#include "dirac/numeric.hpp"

#include <algorithm>
#include <utility>

namespace dirac {

namespace detail {

/// Numerical rank of a vector of singular values sorted in decreasing order.
/// The cut is relative to the largest value, or to `scale` when that is
/// larger (blocks of an orthonormal basis have scale 1, so pure rounding
/// noise there must not count as rank).
inline Index numerical_rank(const Vector& sigma, double rel_tol, double scale = 0.0) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
  const double cut = rel_tol * std::max(sigma(0), scale);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return r;
}

}  // namespace detail

/// A linear subspace of R^k stored as an orthonormal column basis.
///
/// Values are immutable once built. Two instances describe the same subspace
/// exactly when their orthogonal projectors agree (see `equals`).
class Subspace {
 public:
  Subspace() = default;

  /// Column space of `raw`; rank is decided by the global numeric policy.
  static Subspace span_of(const Matrix& raw, double scale = 0.0) {
    Subspace s;
    s.basis_ = Matrix(raw.rows(), 0);
    if (raw.cols() == 0 || raw.rows() == 0) return s;
    Eigen::JacobiSVD<Matrix> svd(raw, Eigen::ComputeThinU);
    const Index r = detail::numerical_rank(svd.singularValues(), numeric_policy().rank_rel_tol, scale);
    s.basis_ = svd.matrixU().leftCols(r);
    return s;
  }

  static Subspace zero(Index ambient_dim) { return from_orthonormal(Matrix(ambient_dim, 0)); }
  static Subspace full(Index ambient_dim) { return from_orthonormal(Matrix::Identity(ambient_dim, ambient_dim)); }

  /// Trusts that `q` already has orthonormal columns.
  static Subspace from_orthonormal(Matrix q) {
    Subspace s;
    s.basis_ = std::move(q);
    return s;
  }

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  const Matrix& basis() const { return basis_; }

  Matrix projector() const { return basis_ * basis_.transpose(); }

  /// Distance of `x` from the subspace (Euclidean).
  double distance(const Vector& x) const {
    return (x - basis_ * (basis_.transpose() * x)).norm();
  }

  bool contains(const Vector& x, double tol = -1.0) const {
    if (tol < 0) tol = numeric_policy().equal_tol;
    return distance(x) <= tol * std::max(1.0, x.norm());
  }

 private:
  Matrix basis_;
};

inline Subspace canonicalize(const Matrix& raw) {
  require_dims(raw.rows() >= 1, "canonicalize: ambient dimension must be positive");
  return Subspace::span_of(raw);
}

/// Right null space {x : m x = 0} as a subspace of R^{m.cols()}, from a
/// column-pivoted QR of mᵀ: the trailing columns of Q span the complement of
/// the row space. Rank uses the same relative tolerance as `span_of`, applied
/// to the diagonal of R.
inline Subspace null_space(const Matrix& m, double scale = 0.0) {
  const Index n = m.cols();
  if (n == 0) return Subspace::zero(0);
  if (m.rows() == 0) return Subspace::full(n);
  const Eigen::ColPivHouseholderQR<Matrix> qr(m.transpose());
  const auto& r = qr.matrixR();
  const Index diag = std::min(r.rows(), r.cols());
  Index rank = 0;
  const double top = diag > 0 ? std::abs(r(0, 0)) : 0.0;
  const double cut = numeric_policy().rank_rel_tol * std::max(top, scale);
  if (top > 0.0)
    while (rank < diag && std::abs(r(rank, rank)) > cut) ++rank;
  const Matrix q = qr.householderQ();
  return Subspace::from_orthonormal(q.rightCols(n - rank));
}

inline Subspace image(const Matrix& map, const Subspace& s) {
  require_dims(map.cols() == s.ambient_dim(), "image: map/subspace mismatch " + dims_str(map.cols(), s.ambient_dim()));
  return Subspace::span_of(map * s.basis());
}

inline Subspace sum(const Subspace& a, const Subspace& b) {
  require_dims(a.ambient_dim() == b.ambient_dim(), "sum: ambient mismatch " + dims_str(a.ambient_dim(), b.ambient_dim()));
  Matrix stacked(a.ambient_dim(), a.dim() + b.dim());
  stacked << a.basis(), b.basis();
  return Subspace::span_of(stacked, 1.0);
}

/// A ∩ B as the null space of [I - P_A; I - P_B].
inline Subspace intersect(const Subspace& a, const Subspace& b) {
  require_dims(a.ambient_dim() == b.ambient_dim(),
               "intersect: ambient mismatch " + dims_str(a.ambient_dim(), b.ambient_dim()));
  const Index k = a.ambient_dim();
  const Matrix id = Matrix::Identity(k, k);
  Matrix stacked(2 * k, k);
  stacked << id - a.projector(), id - b.projector();
  return null_space(stacked, 1.0);
}

/// Euclidean orthogonal complement.
inline Subspace complement(const Subspace& s) {
  if (s.dim() == 0) return Subspace::full(s.ambient_dim());
  return null_space(s.basis().transpose(), 1.0);
}

/// Annihilator F° ⊂ (R^n)*, with covectors written in the standard dual basis.
inline Subspace annihilator(const Subspace& f) { return complement(f); }

/// The symmetric pairing matrix [[0, I], [I, 0]] on R^n ⊕ (R^n)*.
inline Matrix pairing_matrix(Index n) {
  Matrix p = Matrix::Zero(2 * n, 2 * n);
  p.topRightCorner(n, n).setIdentity();
  p.bottomLeftCorner(n, n).setIdentity();
  return p;
}

/// Orthogonal of S with respect to <<(v1,a1),(v2,a2)>> = a1(v2) + a2(v1).
/// The first half of the coordinates are flows, the second half efforts.
inline Subspace pairing_orthogonal(const Subspace& s) {
  const Index k = s.ambient_dim();
  if (k % 2 != 0) throw DimensionError("pairing_orthogonal: odd ambient dimension " + std::to_string(k));
  const Index n = k / 2;
  if (s.dim() == 0) return Subspace::full(k);
  // Swapping the blocks of the basis is the same as multiplying by the pairing matrix.
  Matrix swapped(k, s.dim());
  swapped << s.basis().bottomRows(n), s.basis().topRows(n);
  return null_space(swapped.transpose(), 1.0);
}

/// Frobenius distance between the two orthogonal projectors.
inline double projector_distance(const Subspace& a, const Subspace& b) {
  require_dims(a.ambient_dim() == b.ambient_dim(),
               "compare: ambient mismatch " + dims_str(a.ambient_dim(), b.ambient_dim()));
  return (a.projector() - b.projector()).norm();
}

inline bool equals(const Subspace& a, const Subspace& b, double tol = -1.0) {
  if (tol < 0) tol = numeric_policy().equal_tol;
  return projector_distance(a, b) <= tol;
}

/// Largest distance of a basis vector of `inner` from `outer`; zero iff inner ⊆ outer.
inline double inclusion_defect(const Subspace& inner, const Subspace& outer) {
  require_dims(inner.ambient_dim() == outer.ambient_dim(),
               "inclusion: ambient mismatch " + dims_str(inner.ambient_dim(), outer.ambient_dim()));
  if (inner.dim() == 0) return 0.0;
  const Matrix resid = inner.basis() - outer.basis() * (outer.basis().transpose() * inner.basis());
  return resid.norm();
}

inline bool is_subset(const Subspace& inner, const Subspace& outer, double tol = -1.0) {
  if (tol < 0) tol = numeric_policy().equal_tol;
  return inclusion_defect(inner, outer) <= tol;
}

/// Projection of a subspace of R^{a+b} onto the coordinate block [offset, offset+len).
inline Subspace coordinate_projection(const Subspace& s, Index offset, Index len) {
  require_dims(offset >= 0 && len >= 0 && offset + len <= s.ambient_dim(), "coordinate_projection: bad block");
  return Subspace::span_of(s.basis().middleRows(offset, len), 1.0);
}

}  // namespace dirac
