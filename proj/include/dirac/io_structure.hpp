#pragma once

#include "dirac/transfer.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dirac {

enum class IOKind { fio, ofio, bio, obio };

inline std::string_view to_string(IOKind k) {
  switch (k) {
    case IOKind::fio: return "FIO";
    case IOKind::ofio: return "OFIO";
    case IOKind::bio: return "BIO";
    case IOKind::obio: return "OBIO";
  }
  return "FIO";
}

inline IOKind io_kind_from_string(std::string_view s) {
  if (s == "FIO") return IOKind::fio;
  if (s == "OFIO") return IOKind::ofio;
  if (s == "BIO") return IOKind::bio;
  if (s == "OBIO") return IOKind::obio;
  throw ParseError("unknown io-structure kind '" + std::string(s) + "'");
}

inline bool is_forward(IOKind k) { return k == IOKind::fio || k == IOKind::ofio; }
inline bool is_open(IOKind k) { return k == IOKind::ofio || k == IOKind::obio; }

/// (U1, U2, D_U1, D_U2, coupling) at a single base point. The coupling is
/// g: U2 → U1 (u1_dim × u2_dim) for forward kinds and p: U1 → U2
/// (u2_dim × u1_dim) for backward kinds. Open kinds carry the full space
/// U2 ⊕ U2* as port structure.
struct IOStructure {
  IOKind kind = IOKind::fio;
  Index u1_dim = 0;
  Index u2_dim = 0;
  LinearStructure d_u1;
  LinearStructure port_struct;
  Matrix coupling;

  void validate() const {
    require_dims(d_u1.n() == u1_dim, "io-structure: D_U1 has dimension " + dims_str(d_u1.n(), u1_dim));
    require_dims(port_struct.n() == u2_dim,
                 "io-structure: port structure has dimension " + dims_str(port_struct.n(), u2_dim));
    if (is_forward(kind))
      require_dims(coupling.rows() == u1_dim && coupling.cols() == u2_dim, "io-structure: g must be u1_dim x u2_dim");
    else
      require_dims(coupling.rows() == u2_dim && coupling.cols() == u1_dim, "io-structure: p must be u2_dim x u1_dim");
    if (!d_u1.is_dirac()) throw ClassError("io-structure: D_U1 is not Dirac");
    if (is_open(kind)) {
      if (port_struct.dim() != 2 * u2_dim) throw ClassError("io-structure: open kind needs the full port space");
    } else if (!port_struct.is_dirac()) {
      throw ClassError("io-structure: port structure is not Dirac");
    }
  }
};

inline IOStructure make_fio(LinearStructure d_u1, LinearStructure d_u2, Matrix g) {
  IOStructure a{IOKind::fio, d_u1.n(), d_u2.n(), std::move(d_u1), std::move(d_u2), std::move(g)};
  a.validate();
  return a;
}

inline IOStructure make_ofio(LinearStructure d_u1, Matrix g) {
  const Index m = g.cols();
  IOStructure a{IOKind::ofio, d_u1.n(), m, std::move(d_u1), full_structure(m), std::move(g)};
  a.validate();
  return a;
}

inline IOStructure make_bio(LinearStructure d_u1, LinearStructure d_u2, Matrix p) {
  IOStructure a{IOKind::bio, d_u1.n(), d_u2.n(), std::move(d_u1), std::move(d_u2), std::move(p)};
  a.validate();
  return a;
}

inline IOStructure make_obio(LinearStructure d_u1, Matrix p) {
  const Index m = p.rows();
  IOStructure a{IOKind::obio, d_u1.n(), m, std::move(d_u1), full_structure(m), std::move(p)};
  a.validate();
  return a;
}

/// Φ(u1, u2) = u1 + g u2 for forward kinds, Ψ(u1) = (u1, p u1) for backward kinds.
inline Matrix structure_map(const IOStructure& a) {
  if (is_forward(a.kind)) {
    Matrix phi(a.u1_dim, a.u1_dim + a.u2_dim);
    phi << Matrix::Identity(a.u1_dim, a.u1_dim), a.coupling;
    return phi;
  }
  Matrix psi(a.u1_dim + a.u2_dim, a.u1_dim);
  psi << Matrix::Identity(a.u1_dim, a.u1_dim), a.coupling;
  return psi;
}

/// D_A (closed kinds, Dirac) or Σ_A (open kinds, coisotropic) on U1.
inline LinearStructure effective_structure(const IOStructure& a) {
  const LinearStructure prod = direct_product(a.d_u1, a.port_struct);
  return is_forward(a.kind) ? forward(structure_map(a), prod) : backward(structure_map(a), prod);
}

/// A port pair (u2, α2) certifying (u1, α1) ∈ effective_structure(A), with the
/// residuals of the three defining conditions.
struct PortWitness {
  Vector u2;
  Vector alpha2;
  double residual_u1 = 0.0;     // (u1 - g u2, α1) ∈ D_U1, resp. (u1, α1 - pᵀα2) ∈ D_U1
  double residual_port = 0.0;   // (u2, α2) ∈ D_U2
  double residual_map = 0.0;    // gᵀα1 = α2, resp. p u1 = u2
};

namespace detail {

inline double membership_residual(const LinearStructure& s, const Vector& flow, const Vector& effort) {
  Vector x(2 * s.n());
  x << flow, effort;
  return s.span().distance(x);
}

}  // namespace detail

inline std::optional<PortWitness> membership_witness(const IOStructure& a, const Vector& u1, const Vector& alpha1,
                                                     double tol = 1e-8) {
  require_dims(u1.size() == a.u1_dim && alpha1.size() == a.u1_dim, "membership_witness: vector size mismatch");
  const Index n1 = a.u1_dim, m = a.u2_dim;
  const Index k1 = a.d_u1.dim(), k2 = a.port_struct.dim();
  const Matrix b1v = a.d_u1.flow_block(), b1a = a.d_u1.effort_block();
  const Matrix b2v = a.port_struct.flow_block(), b2a = a.port_struct.effort_block();
  PortWitness w;
  if (is_forward(a.kind)) {
    // Unknowns (u2, c1, c2); α2 = gᵀα1 is forced.
    const Matrix& g = a.coupling;
    w.alpha2 = g.transpose() * alpha1;
    Matrix sys = Matrix::Zero(2 * n1 + 2 * m, m + k1 + k2);
    Vector rhs(2 * n1 + 2 * m);
    sys.block(0, 0, n1, m) = g;
    sys.block(0, m, n1, k1) = b1v;
    sys.block(n1, m, n1, k1) = b1a;
    sys.block(2 * n1, 0, m, m) = -Matrix::Identity(m, m);
    sys.block(2 * n1, m + k1, m, k2) = b2v;
    sys.block(2 * n1 + m, m + k1, m, k2) = b2a;
    rhs << u1, alpha1, Vector::Zero(m), w.alpha2;
    const Vector sol = sys.completeOrthogonalDecomposition().solve(rhs);
    w.u2 = sol.head(m);
    w.residual_u1 = detail::membership_residual(a.d_u1, u1 - g * w.u2, alpha1);
    w.residual_port = detail::membership_residual(a.port_struct, w.u2, w.alpha2);
    w.residual_map = (g.transpose() * alpha1 - w.alpha2).norm();
  } else {
    // Unknowns (α2, c1, c2); u2 = p u1 is forced.
    const Matrix& p = a.coupling;
    w.u2 = p * u1;
    Matrix sys = Matrix::Zero(2 * n1 + 2 * m, m + k1 + k2);
    Vector rhs(2 * n1 + 2 * m);
    sys.block(0, m, n1, k1) = b1v;
    sys.block(n1, 0, n1, m) = p.transpose();
    sys.block(n1, m, n1, k1) = b1a;
    sys.block(2 * n1, m + k1, m, k2) = b2v;
    sys.block(2 * n1 + m, 0, m, m) = -Matrix::Identity(m, m);
    sys.block(2 * n1 + m, m + k1, m, k2) = b2a;
    rhs << u1, alpha1, w.u2, Vector::Zero(m);
    const Vector sol = sys.completeOrthogonalDecomposition().solve(rhs);
    w.alpha2 = sol.head(m);
    w.residual_u1 = detail::membership_residual(a.d_u1, u1, alpha1 - p.transpose() * w.alpha2);
    w.residual_port = detail::membership_residual(a.port_struct, w.u2, w.alpha2);
    w.residual_map = (p * u1 - w.u2).norm();
  }
  const double scale = std::max(1.0, std::max(u1.norm(), alpha1.norm()));
  if (std::max({w.residual_u1, w.residual_port, w.residual_map}) > tol * scale) return std::nullopt;
  return w;
}

namespace detail {

inline Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Index rows = 0, cols = 0;
  for (const auto& b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Matrix out = Matrix::Zero(rows, cols);
  Index r = 0, c = 0;
  for (const auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace detail

/// Product of a family of open structures of the same kind, in list order.
inline IOStructure product(const std::vector<IOStructure>& items) {
  require_dims(!items.empty(), "product of an empty family");
  const IOKind kind = items.front().kind;
  if (!is_open(kind)) throw ClassError("product: only OFIO or OBIO structures can be multiplied");
  std::vector<LinearStructure> d;
  std::vector<Matrix> c;
  for (const auto& it : items) {
    if (it.kind != kind) throw ClassError("product: mixed kinds in family");
    d.push_back(it.d_u1);
    c.push_back(it.coupling);
  }
  const Matrix coupling = detail::block_diagonal(c);
  return kind == IOKind::ofio ? make_ofio(direct_product(d), coupling) : make_obio(direct_product(d), coupling);
}

/// Closes the ports of an open structure with a Dirac structure on U2.
inline IOStructure interconnect(const IOStructure& open, const LinearStructure& d_ports) {
  if (!is_open(open.kind)) throw ClassError("interconnect: structure is already closed");
  require_dims(d_ports.n() == open.u2_dim, "interconnect: port structure dimension " +
                                               dims_str(d_ports.n(), open.u2_dim));
  if (!d_ports.is_dirac()) throw ClassError("interconnect: port structure is not Dirac");
  return open.kind == IOKind::ofio ? make_fio(open.d_u1, d_ports, open.coupling)
                                   : make_bio(open.d_u1, d_ports, open.coupling);
}

/// The PH-structure on U1 × U2 attached to an open structure, with ports
/// counted so that closing them through D_I in `compose` matches
/// `interconnect` with the same D_I:
///   OFIO: {(u1, u2, α1, α2) : (u1 - g u2, α1) ∈ D_U1, α2 = -gᵀα1}
///   OBIO: {(u1, u2, α1, α2) : (u1, α1 + pᵀα2) ∈ D_U1, u2 = p u1}
/// With `incoming_positive = false` the port effort sign is flipped
/// (α2 = +gᵀα1, resp. α1 - pᵀα2), which is the same set without the minus
/// sign used for incoming power.
inline LinearStructure ph_structure(const IOStructure& a, bool incoming_positive = true) {
  if (!is_open(a.kind)) throw ClassError("ph_structure: needs an open structure");
  const double s = incoming_positive ? 1.0 : -1.0;
  const Index n1 = a.u1_dim, m = a.u2_dim;
  const Matrix bv = a.d_u1.flow_block(), ba = a.d_u1.effort_block();
  const Index k = a.d_u1.dim();
  Matrix flows = Matrix::Zero(n1 + m, k + m), efforts = Matrix::Zero(n1 + m, k + m);
  if (a.kind == IOKind::ofio) {
    const Matrix& g = a.coupling;
    flows.block(0, 0, n1, k) = bv;
    flows.block(0, k, n1, m) = g;
    flows.block(n1, k, m, m).setIdentity();
    efforts.block(0, 0, n1, k) = ba;
    efforts.block(n1, 0, m, k) = -s * g.transpose() * ba;
  } else {
    const Matrix& p = a.coupling;
    flows.block(0, 0, n1, k) = bv;
    flows.block(n1, 0, m, k) = p * bv;
    efforts.block(0, 0, n1, k) = ba;
    efforts.block(0, k, n1, m) = -s * p.transpose();
    efforts.block(n1, k, m, m).setIdentity();
  }
  return LinearStructure::from_blocks(flows, efforts);
}

}  // namespace dirac
