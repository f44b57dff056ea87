#pragma once

#include "dirac/structure.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace dirac {

// A linear map φ: V → W is a plain matrix of shape dim W × dim V. Its dual
// φ*: W* → V* is the transpose.

namespace detail {

inline void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw DimensionError(std::string(what) + ": map has non-finite entries");
}

}  // namespace detail

/// Fφ(S) = {(φv, w) : (v, φ*w) ∈ S}.
inline LinearStructure forward(const Matrix& phi, const LinearStructure& s) {
  detail::require_finite(phi, "forward");
  require_dims(phi.cols() == s.n(), "forward: map source dimension " + dims_str(phi.cols(), s.n()));
  const Index m = phi.rows(), k = s.dim();
  // Unknowns (c, w) with B_α c = φᵀ w.
  Matrix sys(s.n(), k + m);
  sys << s.effort_block(), -phi.transpose();
  const Subspace sol = null_space(sys, 1.0);
  Matrix img(2 * m, sol.dim());
  img << phi * s.flow_block() * sol.basis().topRows(k), sol.basis().bottomRows(m);
  return LinearStructure(Subspace::span_of(img, 1.0));
}

/// Bφ(S) = {(v, φ*w) : (φv, w) ∈ S}.
inline LinearStructure backward(const Matrix& phi, const LinearStructure& s) {
  detail::require_finite(phi, "backward");
  require_dims(phi.rows() == s.n(), "backward: map target dimension " + dims_str(phi.rows(), s.n()));
  const Index n = phi.cols(), k = s.dim();
  // Unknowns (v, c) with φ v = B_v c.
  Matrix sys(s.n(), n + k);
  sys << phi, -s.flow_block();
  const Subspace sol = null_space(sys, 1.0);
  Matrix img(2 * n, sol.dim());
  img << sol.basis().topRows(n), phi.transpose() * s.effort_block() * sol.basis().bottomRows(k);
  return LinearStructure(Subspace::span_of(img, 1.0));
}

namespace detail {

/// Smallest singular value above the rank cut, or +inf when there is none.
inline double smallest_nonzero_sv(const Matrix& m) {
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  const Vector sv = Eigen::JacobiSVD<Matrix>(m).singularValues();
  const Index r = numerical_rank(sv, numeric_policy().rank_rel_tol, 1.0);
  return r == 0 ? std::numeric_limits<double>::infinity() : sv(r - 1);
}

}  // namespace detail

/// Distance of a forward transfer from a rank change: the smallest nonzero
/// singular value of the constraint system and of the image map on its
/// solutions. Rounding in the inputs is amplified roughly by the inverse of
/// the product of these two numbers.
inline std::pair<double, double> forward_gap(const Matrix& phi, const LinearStructure& s) {
  const Index m = phi.rows(), k = s.dim();
  Matrix sys(s.n(), k + m);
  sys << s.effort_block(), -phi.transpose();
  const Subspace sol = null_space(sys, 1.0);
  Matrix img(2 * m, sol.dim());
  img << phi * s.flow_block() * sol.basis().topRows(k), sol.basis().bottomRows(m);
  return {detail::smallest_nonzero_sv(sys), detail::smallest_nonzero_sv(img)};
}

inline std::pair<double, double> backward_gap(const Matrix& phi, const LinearStructure& s) {
  const Index n = phi.cols(), k = s.dim();
  Matrix sys(s.n(), n + k);
  sys << phi, -s.flow_block();
  const Subspace sol = null_space(sys, 1.0);
  Matrix img(2 * n, sol.dim());
  img << sol.basis().topRows(n), phi.transpose() * s.effort_block() * sol.basis().bottomRows(k);
  return {detail::smallest_nonzero_sv(sys), detail::smallest_nonzero_sv(img)};
}

/// D1 ⊠ D2 = {(u, α) : (u, α - β) ∈ D1, (u, β) ∈ D2}, the backward of D1 × D2
/// along the diagonal.
inline LinearStructure tensor_product(const LinearStructure& d1, const LinearStructure& d2) {
  require_dims(d1.n() == d2.n(), "tensor_product: flow spaces differ " + dims_str(d1.n(), d2.n()));
  const Index n = d1.n();
  Matrix diag(2 * n, n);
  diag << Matrix::Identity(n, n), Matrix::Identity(n, n);
  return backward(diag, direct_product(d1, d2));
}

/// Dimensions of the port-Hamiltonian composition U1 × U2 ⊗ V1 × V2.
struct ComposeDims {
  Index u1 = 0, u2 = 0, v1 = 0, v2 = 0;
};

/// The maps of the composition: φ(u1, u2, v1, v2) = (u1, u2 | u2, v2 | v1, v2)
/// into (U1 × U2) × (U2 × V2) × (V1 × V2), and ψ(u1, u2, v1, v2) = (u1, v1).
struct ComposeMaps {
  Matrix phi;
  Matrix psi;
};

inline ComposeMaps compose_maps(const ComposeDims& d) {
  const Index total = d.u1 + d.u2 + d.v1 + d.v2;
  const Index ou1 = 0, ou2 = d.u1, ov1 = d.u1 + d.u2, ov2 = d.u1 + d.u2 + d.v1;
  ComposeMaps m;
  m.phi = Matrix::Zero(d.u1 + 2 * d.u2 + d.v1 + 2 * d.v2, total);
  Index row = 0;
  auto place = [&](Index col, Index len) {
    m.phi.block(row, col, len, len).setIdentity();
    row += len;
  };
  place(ou1, d.u1);
  place(ou2, d.u2);
  place(ou2, d.u2);
  place(ov2, d.v2);
  place(ov1, d.v1);
  place(ov2, d.v2);
  m.psi = Matrix::Zero(d.u1 + d.v1, total);
  m.psi.block(0, ou1, d.u1, d.u1).setIdentity();
  m.psi.block(d.u1, ov1, d.v1, d.v1).setIdentity();
  return m;
}

/// Composition of PH-structures Da on U1 × U2 and Db on V1 × V2 through the
/// interconnection Di on U2 × V2, computed as Fψ ∘ Bφ applied to Da × Di × Db.
/// The result is the set of (u1, v1, α1, β1) for which some (u2, v2, -α2, -β2)
/// in Di has (u1, u2, α1, α2) ∈ Da and (v1, v2, β1, β2) ∈ Db.
inline LinearStructure compose(const LinearStructure& da, const LinearStructure& db, const LinearStructure& di,
                               const ComposeDims& d) {
  require_dims(da.n() == d.u1 + d.u2, "compose: Da lives on dimension " + dims_str(da.n(), d.u1 + d.u2));
  require_dims(db.n() == d.v1 + d.v2, "compose: Db lives on dimension " + dims_str(db.n(), d.v1 + d.v2));
  require_dims(di.n() == d.u2 + d.v2, "compose: Di lives on dimension " + dims_str(di.n(), d.u2 + d.v2));
  if (!da.is_dirac() || !db.is_dirac() || !di.is_dirac())
    throw ClassError("compose: all three structures must be Dirac");
  const ComposeMaps maps = compose_maps(d);
  const LinearStructure product = direct_product({da, di, db});
  return forward(maps.psi, backward(maps.phi, product));
}

/// Both sides of t(Fφ(D)) = Bφ*(t(D)).
struct DualityRecord {
  LinearStructure twisted_forward;
  LinearStructure backward_of_twist;
  double distance = 0.0;
  bool equal = false;
};

inline DualityRecord duality_transport(const Matrix& phi, const LinearStructure& d) {
  DualityRecord r{twist(forward(phi, d)), backward(phi.transpose(), twist(d)), 0.0, false};
  r.distance = projector_distance(r.twisted_forward.span(), r.backward_of_twist.span());
  r.equal = r.distance <= numeric_policy().equal_tol;
  return r;
}

}  // namespace dirac
