#pragma once

#include "dirac/subspace.hpp"

#include <cmath>
#include <string>
#include <string_view>
#include <vector>

namespace dirac {

// Coordinates on V ⊕ V* (dim V = n) always put the n flow coordinates first and
// the n effort coordinates last. Covectors are written in the standard dual
// basis, so V* is identified with R^n.

enum class StructureClass { isotropic, coisotropic, dirac, general };

inline std::string_view to_string(StructureClass c) {
  switch (c) {
    case StructureClass::isotropic: return "isotropic";
    case StructureClass::coisotropic: return "coisotropic";
    case StructureClass::dirac: return "dirac";
    case StructureClass::general: return "general";
  }
  return "general";
}

inline StructureClass class_from_string(std::string_view s) {
  if (s == "isotropic") return StructureClass::isotropic;
  if (s == "coisotropic") return StructureClass::coisotropic;
  if (s == "dirac") return StructureClass::dirac;
  if (s == "general") return StructureClass::general;
  throw ParseError("unknown structure class '" + std::string(s) + "'");
}

/// Outcome of the two inclusion tests S ⊆ S^⊥ and S^⊥ ⊆ S.
struct ClassReport {
  StructureClass tag = StructureClass::general;
  double isotropy_defect = 0.0;    // distance of S from S^⊥
  double coisotropy_defect = 0.0;  // distance of S^⊥ from S
  /// A failed inclusion whose defect is within 1e3 of the tolerance. Such
  /// inputs are most likely rounding-damaged and are tagged conservatively.
  bool borderline = false;
};

namespace detail {

/// |Bᵀ P B| for an orthonormal basis B. This equals the distance of S from
/// S^⊥ in the sense of `inclusion_defect`, because P B is an orthonormal
/// basis of the Euclidean image of S^⊥'s complement.
inline double pairing_gram_norm(const Matrix& b) {
  const Index n = b.rows() / 2;
  if (b.cols() == 0) return 0.0;
  const Matrix gram = b.topRows(n).transpose() * b.bottomRows(n);
  return (gram + gram.transpose()).norm();
}

}  // namespace detail

inline ClassReport classify_report(const Subspace& s) {
  if (s.ambient_dim() % 2 != 0)
    throw DimensionError("classify: odd ambient dimension " + std::to_string(s.ambient_dim()));
  const double tol = numeric_policy().equal_tol;
  const Index n = s.ambient_dim() / 2;
  ClassReport r;
  r.isotropy_defect = detail::pairing_gram_norm(s.basis());
  // S^⊥ ⊆ S is the isotropy of S^⊥; for dim S = n both defects coincide.
  r.coisotropy_defect =
      s.dim() == n ? r.isotropy_defect : detail::pairing_gram_norm(pairing_orthogonal(s).basis());
  const bool iso = r.isotropy_defect <= tol;
  const bool coiso = r.coisotropy_defect <= tol;
  r.borderline = (!iso && r.isotropy_defect <= 1e3 * tol) || (!coiso && r.coisotropy_defect <= 1e3 * tol);
  if (iso && coiso)
    r.tag = StructureClass::dirac;
  else if (iso)
    r.tag = StructureClass::isotropic;
  else if (coiso)
    r.tag = StructureClass::coisotropic;
  else
    r.tag = StructureClass::general;
  return r;
}

inline StructureClass classify(const Subspace& s) { return classify_report(s).tag; }

inline bool is_isotropic_tag(StructureClass c) { return c == StructureClass::isotropic || c == StructureClass::dirac; }
inline bool is_coisotropic_tag(StructureClass c) { return c == StructureClass::coisotropic || c == StructureClass::dirac; }

/// A subspace of V ⊕ V* together with its (cached) classification.
class LinearStructure {
 public:
  LinearStructure() : LinearStructure(Subspace::zero(0)) {}

  explicit LinearStructure(Subspace span) : span_(std::move(span)) {
    if (span_.ambient_dim() % 2 != 0)
      throw DimensionError("structure on V+V* needs even ambient dimension, got " +
                           std::to_string(span_.ambient_dim()));
    tag_ = classify(span_);
  }

  /// Span of the columns [flows; efforts].
  static LinearStructure from_blocks(const Matrix& flows, const Matrix& efforts) {
    require_dims(flows.rows() == efforts.rows() && flows.cols() == efforts.cols(),
                 "from_blocks: flow/effort block mismatch");
    Matrix m(2 * flows.rows(), flows.cols());
    m << flows, efforts;
    return LinearStructure(Subspace::span_of(m));
  }

  Index n() const { return span_.ambient_dim() / 2; }
  Index dim() const { return span_.dim(); }
  const Subspace& span() const { return span_; }
  StructureClass class_tag() const { return tag_; }
  bool is_dirac() const { return tag_ == StructureClass::dirac; }

  /// Flow and effort rows of the basis.
  auto flow_block() const { return span_.basis().topRows(n()); }
  auto effort_block() const { return span_.basis().bottomRows(n()); }

  /// F_S, the projection on V.
  Subspace flow_projection() const { return Subspace::span_of(flow_block(), 1.0); }
  /// F^(*)_S, the projection on V*.
  Subspace effort_projection() const { return Subspace::span_of(effort_block(), 1.0); }

  bool contains(const Vector& flow, const Vector& effort, double tol = -1.0) const {
    Vector x(2 * n());
    x << flow, effort;
    return span_.contains(x, tol);
  }

  /// Recomputes the classification from scratch.
  ClassReport audit() const { return classify_report(span_); }

 private:
  Subspace span_;
  StructureClass tag_ = StructureClass::dirac;
};

inline bool equals(const LinearStructure& a, const LinearStructure& b, double tol = -1.0) {
  return a.n() == b.n() && equals(a.span(), b.span(), tol);
}

inline LinearStructure pairing_orthogonal(const LinearStructure& s) {
  return LinearStructure(pairing_orthogonal(s.span()));
}

/// Skew 2-form on R^n stored as the matrix of the flat map: flat(v) = mat * v,
/// so that ω(u, v) = flat(u)(v) = (mat u)·v and mat(i, j) = ω(e_j, e_i).
struct TwoForm {
  Matrix mat;

  TwoForm() = default;
  explicit TwoForm(Matrix m) : mat(std::move(m)) { validate(); }

  static TwoForm zero(Index n) { return TwoForm(Matrix::Zero(n, n)); }
  /// From the table of values b(i, j) = ω(e_i, e_j).
  static TwoForm from_values(const Matrix& b) { return TwoForm(Matrix(b.transpose())); }

  Index n() const { return mat.rows(); }
  Vector flat(const Vector& v) const { return mat * v; }
  double operator()(const Vector& u, const Vector& v) const { return (mat * u).dot(v); }

  void validate() const {
    require_dims(mat.rows() == mat.cols(), "two-form matrix must be square");
    if ((mat + mat.transpose()).norm() > 1e-12 * std::max(1.0, mat.norm()))
      throw ClassError("two-form matrix is not skew-symmetric");
  }
};

/// Skew bivector on R^n stored as the matrix of the sharp map: sharp(α) = mat * α,
/// so that Λ(β, α) = β·(mat α).
struct Bivector {
  Matrix mat;

  Bivector() = default;
  explicit Bivector(Matrix m) : mat(std::move(m)) { validate(); }

  Index n() const { return mat.rows(); }
  Vector sharp(const Vector& alpha) const { return mat * alpha; }
  double operator()(const Vector& beta, const Vector& alpha) const { return beta.dot(mat * alpha); }

  void validate() const {
    require_dims(mat.rows() == mat.cols(), "bivector matrix must be square");
    if ((mat + mat.transpose()).norm() > 1e-12 * std::max(1.0, mat.norm()))
      throw ClassError("bivector matrix is not skew-symmetric");
  }
};

/// D_{F,ω} = {u ⊕ α : u ∈ F, α(v) = ω(u, v) for all v ∈ F}.
inline LinearStructure from_pair(const Subspace& f, const TwoForm& omega) {
  const Index n = f.ambient_dim();
  require_dims(omega.n() == n, "from_pair: subspace in R^" + std::to_string(n) + " but form on R^" +
                                   std::to_string(omega.n()));
  omega.validate();
  const Subspace ann = annihilator(f);
  Matrix flows(n, n), efforts(n, n);
  flows << f.basis(), Matrix::Zero(n, ann.dim());
  efforts << omega.mat * f.basis(), ann.basis();
  return LinearStructure::from_blocks(flows, efforts);
}

/// Graph of the flat map of a 2-form (the F = V case).
inline LinearStructure graph(const TwoForm& omega) { return from_pair(Subspace::full(omega.n()), omega); }

/// D = {(v, α) : α ∈ C, β(v) = Λ(β, α) for all β ∈ C}.
inline LinearStructure from_bivector(const Bivector& lambda, const Subspace& codistribution) {
  const Index n = codistribution.ambient_dim();
  require_dims(lambda.n() == n, "from_bivector: codistribution in R^" + std::to_string(n) + " but bivector on R^" +
                                    std::to_string(lambda.n()));
  lambda.validate();
  const Subspace ann = annihilator(codistribution);
  Matrix flows(n, n), efforts(n, n);
  flows << lambda.mat * codistribution.basis(), ann.basis();
  efforts << codistribution.basis(), Matrix::Zero(n, ann.dim());
  return LinearStructure::from_blocks(flows, efforts);
}

inline LinearStructure graph(const Bivector& lambda) { return from_bivector(lambda, Subspace::full(lambda.n())); }

/// t(D) = {α ⊕ u : u ⊕ α ∈ D}, a structure on V*.
inline LinearStructure twist(const LinearStructure& d) {
  const Index n = d.n();
  Matrix swapped(2 * n, d.dim());
  swapped << d.effort_block(), d.flow_block();
  return LinearStructure(Subspace::from_orthonormal(swapped));
}

/// Product structure on V1 × V2 (flows (v1, v2), efforts (α1, α2)).
inline LinearStructure direct_product(const LinearStructure& a, const LinearStructure& b) {
  const Index na = a.n(), nb = b.n(), n = na + nb;
  Matrix basis = Matrix::Zero(2 * n, a.dim() + b.dim());
  basis.block(0, 0, na, a.dim()) = a.flow_block();
  basis.block(n, 0, na, a.dim()) = a.effort_block();
  basis.block(na, a.dim(), nb, b.dim()) = b.flow_block();
  basis.block(n + na, a.dim(), nb, b.dim()) = b.effort_block();
  return LinearStructure(Subspace::from_orthonormal(basis));
}

inline LinearStructure direct_product(const std::vector<LinearStructure>& parts) {
  require_dims(!parts.empty(), "direct_product of an empty family");
  LinearStructure acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = direct_product(acc, parts[i]);
  return acc;
}

/// V ⊕ V*, the maximal coisotropic structure.
inline LinearStructure full_structure(Index n) { return LinearStructure(Subspace::full(2 * n)); }
/// V ⊕ {0}.
inline LinearStructure pure_flows(Index n) { return from_pair(Subspace::full(n), TwoForm::zero(n)); }
/// {0} ⊕ V*.
inline LinearStructure pure_efforts(Index n) { return from_pair(Subspace::zero(n), TwoForm::zero(n)); }

/// F_D together with ω_D written in the orthonormal basis `range.basis()`.
struct RangeAndForm {
  Subspace range;
  TwoForm omega;  // dim F × dim F, same flat-map convention as TwoForm
  /// max of (how far pure-effort elements are from annihilating F) and
  /// (how far the recovered form is from skew, relative to its squared size)
  double defect = 0.0;
};

namespace detail {

/// Flow block of S split by one SVD, so that the flow range, the minimum-norm
/// lifts and the pure-effort part all use the same numerical rank.
struct FlowSplit {
  Matrix range;      // orthonormal basis of the flow projection
  Matrix lift;       // coefficients c with flow_block c = target, per range column: V_r Σ_r⁻¹
  Matrix kernel;     // coefficients with zero flow
};

inline FlowSplit split_flows(const LinearStructure& s) {
  FlowSplit f;
  const Index n = s.n(), k = s.dim();
  if (k == 0) {
    f.range = Matrix(n, 0);
    f.lift = Matrix(0, 0);
    f.kernel = Matrix(0, 0);
    return f;
  }
  const Matrix fb = s.flow_block();
  Eigen::JacobiSVD<Matrix> svd(fb, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const Index r = numerical_rank(svd.singularValues(), numeric_policy().rank_rel_tol, 1.0);
  f.range = svd.matrixU().leftCols(r);
  f.lift = svd.matrixV().leftCols(r) * svd.singularValues().head(r).cwiseInverse().asDiagonal();
  f.kernel = svd.matrixV().rightCols(k - r);
  return f;
}

/// For every column q of `targets` (all in the flow projection of S), an
/// effort α with (q, α) ∈ S, chosen by minimum-norm coefficients.
inline Matrix efforts_over(const LinearStructure& s, const Matrix& targets) {
  if (targets.cols() == 0) return Matrix(s.n(), 0);
  const FlowSplit f = split_flows(s);
  return s.effort_block() * (f.lift * (f.range.transpose() * targets));
}

/// Efforts of the elements of S with zero flow, S ∩ ({0} ⊕ V*).
inline Subspace pure_effort_part(const LinearStructure& s) {
  if (s.dim() == 0) return Subspace::zero(s.n());
  return Subspace::span_of(s.effort_block() * split_flows(s).kernel, 1.0);
}

}  // namespace detail

/// Requires S isotropic (Dirac included); otherwise ω is not well defined and
/// ClassError reports the defect.
inline RangeAndForm range_and_form(const LinearStructure& s) {
  RangeAndForm out;
  const detail::FlowSplit split = detail::split_flows(s);
  out.range = Subspace::from_orthonormal(split.range);
  const Matrix& q = split.range;
  const Matrix alphas = s.effort_block() * split.lift;
  Matrix m = q.transpose() * alphas;  // column i = restriction of α_i to F
  const Subspace pure =
      s.dim() == 0 ? Subspace::zero(s.n()) : Subspace::span_of(s.effort_block() * split.kernel, 1.0);
  const double ambiguity = pure.dim() == 0 ? 0.0 : (q.transpose() * pure.basis()).norm();
  // Lifting through small flow singular values scales both m and its rounding.
  const double skew = (m + m.transpose()).norm() / std::max(1.0, m.squaredNorm());
  out.defect = std::max(ambiguity, skew);
  if (out.defect > numeric_policy().equal_tol)
    throw ClassError("range_and_form: induced form is ill-defined (defect " + std::to_string(out.defect) +
                     "); the structure is not isotropic");
  m = 0.5 * (m - m.transpose());
  out.omega.mat = m;
  return out;
}

/// Extends a form given on F (in the coordinates of F.basis()) by zero on F^⊥.
inline TwoForm extend_form(const Subspace& f, const TwoForm& on_f) {
  require_dims(on_f.n() == f.dim(), "extend_form: form dimension does not match subspace");
  return TwoForm(Matrix(f.basis() * on_f.mat * f.basis().transpose()));
}

/// Parameters of an isotropic structure Σ relative to V = F ⊕ F1 with F1 = F^⊥:
///
///   Σ = { (u, flat_F(u) + coupling(u) + η) : u ∈ F, η ∈ N },
///
/// where N = F2^{∘F1} (covectors on F1 that vanish on F2; with the Euclidean
/// identification this is F1 ⊖ F2). `coupling` maps F into F2* and records the
/// F1-components of the covectors paired with flows in F. It is zero for
/// Dirac structures and for every structure of the block form
/// D_{ω_F} ⊕ ({0} ⊕ F2^{∘F1}).
struct IsotropicParts {
  Index n = 0;
  Subspace f;         // F_Σ
  TwoForm omega_f;    // on F, in coordinates of f.basis()
  Subspace f1;        // F^⊥
  Subspace f2;        // ⊆ F1
  Matrix coupling;    // dim F2 × dim F, in the bases of f2 and f
};

inline LinearStructure reconstruct(const IsotropicParts& p) {
  const Index n = p.n;
  const Subspace ann_f2 = intersect(p.f1, complement(p.f2));
  const Index r = p.f.dim();
  Matrix flows = Matrix::Zero(n, r + ann_f2.dim());
  Matrix efforts = Matrix::Zero(n, r + ann_f2.dim());
  flows.leftCols(r) = p.f.basis();
  efforts.leftCols(r) = p.f.basis() * p.omega_f.mat;
  if (p.f2.dim() > 0 && r > 0) efforts.leftCols(r) += p.f2.basis() * p.coupling;
  efforts.rightCols(ann_f2.dim()) = ann_f2.basis();
  return LinearStructure::from_blocks(flows, efforts);
}

inline IsotropicParts isotropic_decompose(const LinearStructure& s) {
  if (!is_isotropic_tag(s.class_tag()))
    throw ClassError(std::string("isotropic_decompose: structure is ") + std::string(to_string(s.class_tag())));
  IsotropicParts p;
  p.n = s.n();
  const RangeAndForm rf = range_and_form(s);
  p.f = rf.range;
  p.omega_f = rf.omega;
  p.f1 = complement(p.f);
  const Subspace pure = detail::pure_effort_part(s);
  p.f2 = intersect(p.f1, complement(pure));
  const Matrix alphas = detail::efforts_over(s, p.f.basis());
  p.coupling = p.f2.basis().transpose() * alphas;
  return p;
}

/// Decomposition of a coisotropic S through the isotropic S^⊥, plus the
/// complement F3 of F2 inside F1 so that V = F ⊕ F3 ⊕ F2.
struct CoisotropicParts {
  IsotropicParts perp;  // parameters of S^⊥
  Subspace f3;
};

inline CoisotropicParts coisotropic_decompose(const LinearStructure& s) {
  if (!is_coisotropic_tag(s.class_tag()))
    throw ClassError(std::string("coisotropic_decompose: structure is ") + std::string(to_string(s.class_tag())));
  CoisotropicParts c;
  c.perp = isotropic_decompose(pairing_orthogonal(s));
  c.f3 = intersect(c.perp.f1, complement(c.perp.f2));
  return c;
}

inline LinearStructure reconstruct(const CoisotropicParts& c) { return pairing_orthogonal(reconstruct(c.perp)); }

}  // namespace dirac
