#pragma once

#include "dirac/structure.hpp"
#include "dirac/transfer.hpp"

#include <Eigen/LU>

namespace dirac::oracle {

// Reference constructions that avoid the forward/backward machinery. They
// solve the defining linear conditions directly with a full-pivot LU kernel,
// so they share no factorization code with `transfer`.

namespace detail {

inline Matrix lu_kernel(const Matrix& m) {
  if (m.cols() == 0) return Matrix(0, 0);
  if (m.rows() == 0) return Matrix::Identity(m.cols(), m.cols());
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-10);
  const Matrix k = lu.kernel();
  // FullPivLU returns a single zero column for a trivial kernel.
  if (lu.rank() == m.cols()) return Matrix(m.cols(), 0);
  return k;
}

}  // namespace detail

/// Witness-set form of the PH composition: all (u1, v1, α1, β1) for which
/// some (u2, v2, -α2, -β2) ∈ Di has (u1, u2, α1, α2) ∈ Da and
/// (v1, v2, β1, β2) ∈ Db.
inline LinearStructure composition_witness_set(const LinearStructure& da, const LinearStructure& db,
                                               const LinearStructure& di, const ComposeDims& d) {
  const Matrix a = da.span().basis(), b = db.span().basis(), c = di.span().basis();
  const Index na = a.cols(), nb = b.cols(), nc = c.cols();
  const Index ra = d.u1 + d.u2, rb = d.v1 + d.v2, ri = d.u2 + d.v2;
  // Row offsets inside each basis: flows then efforts.
  auto a_u2 = [&](Index k) { return a.row(d.u1 + k); };
  auto a_al2 = [&](Index k) { return a.row(ra + d.u1 + k); };
  auto b_v2 = [&](Index k) { return b.row(d.v1 + k); };
  auto b_be2 = [&](Index k) { return b.row(rb + d.v1 + k); };
  const Index eqs = 2 * d.u2 + 2 * d.v2;
  Matrix m = Matrix::Zero(eqs, na + nb + nc);
  Index row = 0;
  for (Index k = 0; k < d.u2; ++k, ++row) {  // u2 agrees
    m.block(row, 0, 1, na) = a_u2(k);
    m.block(row, na + nb, 1, nc) = -c.row(k);
  }
  for (Index k = 0; k < d.v2; ++k, ++row) {  // v2 agrees
    m.block(row, na, 1, nb) = b_v2(k);
    m.block(row, na + nb, 1, nc) = -c.row(d.u2 + k);
  }
  for (Index k = 0; k < d.u2; ++k, ++row) {  // Di effort on U2 is -α2
    m.block(row, 0, 1, na) = a_al2(k);
    m.block(row, na + nb, 1, nc) = c.row(ri + k);
  }
  for (Index k = 0; k < d.v2; ++k, ++row) {  // Di effort on V2 is -β2
    m.block(row, na, 1, nb) = b_be2(k);
    m.block(row, na + nb, 1, nc) = c.row(ri + d.u2 + k);
  }
  const Matrix ker = detail::lu_kernel(m);
  const Index n = d.u1 + d.v1;
  Matrix out = Matrix::Zero(2 * n, ker.cols());
  for (Index j = 0; j < ker.cols(); ++j) {
    const Vector za = ker.col(j).head(na), zb = ker.col(j).segment(na, nb);
    const Vector va = a * za, vb = b * zb;
    out.col(j) << va.head(d.u1), vb.head(d.v1), va.segment(ra, d.u1), vb.segment(rb, d.v1);
  }
  return LinearStructure(Subspace::span_of(out));
}

/// The interconnection {(u, û, α, α̂) : û = -u, α̂ = α} on U2 × U2.
inline LinearStructure cancellation_interconnection(Index u2) {
  Matrix flows(2 * u2, u2), efforts(2 * u2, u2);
  flows << Matrix::Identity(u2, u2), -Matrix::Identity(u2, u2);
  efforts << Matrix::Identity(u2, u2), Matrix::Identity(u2, u2);
  Matrix basis = Matrix::Zero(4 * u2, 2 * u2);
  basis.block(0, 0, 2 * u2, u2) = flows;
  basis.block(2 * u2, u2, 2 * u2, u2) = efforts;
  return LinearStructure(Subspace::span_of(basis));
}

/// Da on U1 × U2 and Db on U3 × U2 joined through a shared (u2, α2):
/// (u1, u2, α1, α2) ∈ Da and (u3, -u2, α3, α2) ∈ Db.
inline LinearStructure shared_port_composition(const LinearStructure& da, const LinearStructure& db, Index u1,
                                               Index u2, Index u3) {
  const Matrix a = da.span().basis(), b = db.span().basis();
  const Index na = a.cols(), nb = b.cols();
  const Index ra = u1 + u2, rb = u3 + u2;
  Matrix m(2 * u2, na + nb);
  m.topLeftCorner(u2, na) = a.middleRows(u1, u2);
  m.topRightCorner(u2, nb) = b.middleRows(u3, u2);  // u2 + (-u2) = 0
  m.bottomLeftCorner(u2, na) = a.middleRows(ra + u1, u2);
  m.bottomRightCorner(u2, nb) = -b.middleRows(rb + u3, u2);
  const Matrix ker = detail::lu_kernel(m);
  const Index n = u1 + u3;
  Matrix out(2 * n, ker.cols());
  for (Index j = 0; j < ker.cols(); ++j) {
    const Vector va = a * ker.col(j).head(na), vb = b * ker.col(j).tail(nb);
    out.col(j) << va.head(u1), vb.head(u3), va.segment(ra, u1), vb.segment(rb, u3);
  }
  return LinearStructure(Subspace::span_of(out));
}

/// Forward of a Poisson graph along φ is the graph of φΛφᵀ.
inline LinearStructure forward_of_bivector_graph(const Matrix& phi, const Bivector& lambda) {
  return graph(Bivector(phi * lambda.mat * phi.transpose()));
}

/// Backward of a presymplectic graph along φ is the graph of the pulled-back form.
inline LinearStructure backward_of_form_graph(const Matrix& phi, const TwoForm& omega) {
  return graph(TwoForm(phi.transpose() * omega.mat * phi));
}

/// Largest |⟨α_i, v_j⟩ + ⟨α_j, v_i⟩| over pairs of basis vectors.
inline double max_pairing_on_basis(const LinearStructure& s) {
  const Index n = s.n();
  const Matrix b = s.span().basis();
  if (b.cols() == 0) return 0.0;
  const Matrix g = b.bottomRows(n).transpose() * b.topRows(n);
  return (g + g.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace dirac::oracle
