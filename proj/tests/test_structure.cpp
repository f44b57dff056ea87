#include "dirac/oracles.hpp"
#include "dirac/random.hpp"
#include "dirac/structure.hpp"

#include <gtest/gtest.h>

using namespace dirac;

namespace {

LinearStructure blocks(std::initializer_list<std::initializer_list<double>> columns) {
  const Index k = static_cast<Index>(columns.begin()->size());
  Matrix m(k, static_cast<Index>(columns.size()));
  Index j = 0;
  for (const auto& c : columns) {
    Index i = 0;
    for (double v : c) m(i++, j) = v;
    ++j;
  }
  return LinearStructure(Subspace::span_of(m));
}

Matrix standard_symplectic() {
  Matrix w(2, 2);
  w << 0, -1, 1, 0;  // flat(e1) = e2*, i.e. ω(e1, e2) = 1
  return w;
}

}  // namespace

TEST(FromPair, LineWithZeroFormIsFPlusAnnihilator) {
  Subspace f = Subspace::span_of(Vector::Unit(2, 0));
  const LinearStructure d = from_pair(f, TwoForm::zero(2));
  EXPECT_TRUE(d.is_dirac());
  EXPECT_TRUE(equals(d, blocks({{1, 0, 0, 0}, {0, 0, 0, 1}})));
}

TEST(FromPair, SymplecticPlane) {
  Matrix b(2, 2);
  b << 0, 1, -1, 0;  // ω(e1, e2) = 1
  const TwoForm w = TwoForm::from_values(b);
  EXPECT_DOUBLE_EQ(w(Vector::Unit(2, 0), Vector::Unit(2, 1)), 1.0);
  const LinearStructure d = graph(w);
  EXPECT_TRUE(equals(d, blocks({{1, 0, 0, 1}, {0, 1, -1, 0}})));
  EXPECT_EQ(oracle::max_pairing_on_basis(d), 0.0);
}

TEST(FromPair, RandomPairsAreDirac) {
  random::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const Index n = random::uniform_int(rng, 1, 6);
    const Subspace f = random::subspace(rng, n);
    const TwoForm w(random::skew(rng, n));
    const LinearStructure d = from_pair(f, w);
    EXPECT_EQ(d.class_tag(), StructureClass::dirac);
    EXPECT_EQ(d.dim(), n);
    EXPECT_LE(oracle::max_pairing_on_basis(d), 1e-9);
    EXPECT_TRUE(equals(d.flow_projection(), f));
    // Induced form on F equals ω restricted to F.
    const RangeAndForm rf = range_and_form(d);
    const Matrix restricted = rf.range.basis().transpose() * w.mat * rf.range.basis();
    EXPECT_LE((rf.omega.mat - restricted).norm(), 1e-9);
  }
}

TEST(FromPair, Errors) {
  EXPECT_THROW(from_pair(Subspace::full(2), TwoForm::zero(3)), DimensionError);
  EXPECT_THROW(TwoForm(Matrix::Identity(2, 2)), ClassError);
}

TEST(FromBivector, ZeroBivectorIsPureEfforts) {
  const LinearStructure d = graph(Bivector(Matrix::Zero(3, 3)));
  EXPECT_TRUE(equals(d, pure_efforts(3)));
}

// sharp(α) = mat·α, so for mat = [[0,1],[-1,0]] the graph holds
// (sharp e1*, e1*) = (0,-1 | 1,0) and (sharp e2*, e2*) = (1,0 | 0,1).
TEST(FromBivector, PlanarGraph) {
  Matrix l(2, 2);
  l << 0, 1, -1, 0;
  const LinearStructure d = graph(Bivector(l));
  EXPECT_TRUE(d.is_dirac());
  EXPECT_TRUE(equals(d, blocks({{0, -1, 1, 0}, {1, 0, 0, 1}})));
  // The pairs (0,1|1,0), (-1,0|0,1) span the graph of the transposed bivector.
  EXPECT_TRUE(equals(graph(Bivector(l.transpose())), blocks({{0, 1, 1, 0}, {-1, 0, 0, 1}})));
}

TEST(FromBivector, DegenerateOnR3) {
  Matrix l = Matrix::Zero(3, 3);
  l(0, 1) = 1;
  l(1, 0) = -1;
  const LinearStructure d = graph(Bivector(l));
  EXPECT_TRUE(d.is_dirac());
  // Oracle: image of sharp.
  EXPECT_TRUE(equals(d.flow_projection(), Subspace::span_of(l)));
  EXPECT_EQ(d.flow_projection().dim(), 2);
}

TEST(FromBivector, RandomCodistributionsAreDirac) {
  random::Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const Index n = random::uniform_int(rng, 1, 6);
    const Subspace c = random::subspace(rng, n);
    const LinearStructure d = from_bivector(Bivector(random::skew(rng, n)), c);
    EXPECT_TRUE(d.is_dirac());
    EXPECT_EQ(d.dim(), n);
    EXPECT_TRUE(equals(d.effort_projection(), c));
  }
}

TEST(FromBivector, Errors) {
  EXPECT_THROW(from_bivector(Bivector(Matrix::Zero(2, 2)), Subspace::full(3)), DimensionError);
  Matrix l(2, 2);
  l << 0, 1, 0, 0;
  EXPECT_THROW(Bivector{l}, ClassError);
}

TEST(Classify, Extremes) {
  EXPECT_EQ(classify(Subspace::zero(4)), StructureClass::isotropic);
  EXPECT_EQ(classify(Subspace::full(4)), StructureClass::coisotropic);
  EXPECT_EQ(classify(Subspace::zero(0)), StructureClass::dirac);
  EXPECT_THROW(classify(Subspace::full(3)), DimensionError);
}

TEST(Classify, GeneralStructure) {
  // (e1, e1*) pairs with itself to 2.
  EXPECT_EQ(blocks({{1, 0, 1, 0}}).class_tag(), StructureClass::general);
}

TEST(Classify, GraphsOfFormsAreDirac) {
  random::Rng rng(19);
  for (int i = 0; i < 50; ++i) {
    const Index n = random::uniform_int(rng, 1, 6);
    const LinearStructure d = graph(TwoForm(random::skew(rng, n)));
    EXPECT_TRUE(d.is_dirac());
    EXPECT_LE(oracle::max_pairing_on_basis(d), 1e-9);
  }
}

TEST(Classify, AgreesWithInclusionTests) {
  random::Rng rng(23);
  for (int i = 0; i < 100; ++i) {
    const Index n = random::uniform_int(rng, 1, 4);
    const Subspace s = random::subspace(rng, 2 * n);
    const Subspace perp = pairing_orthogonal(s);
    const bool iso = is_subset(s, perp), coiso = is_subset(perp, s);
    const StructureClass c = classify(s);
    EXPECT_EQ(is_isotropic_tag(c), iso);
    EXPECT_EQ(is_coisotropic_tag(c), coiso);
  }
}

TEST(Classify, AuditMatchesCachedTag) {
  random::Rng rng(29);
  for (int i = 0; i < 20; ++i) {
    const LinearStructure d = random::coisotropic(rng, 4);
    EXPECT_EQ(d.audit().tag, d.class_tag());
  }
}

TEST(Twist, PureFlowsBecomePureEfforts) {
  EXPECT_TRUE(equals(twist(pure_flows(3)), pure_efforts(3)));
  EXPECT_TRUE(equals(twist(pure_flows(3)), graph(Bivector(Matrix::Zero(3, 3)))));
}

TEST(Twist, InvolutionPreservingClass) {
  random::Rng rng(31);
  for (int i = 0; i < 100; ++i) {
    const Index n = random::uniform_int(rng, 1, 5);
    const LinearStructure s = i % 3 == 0 ? random::dirac(rng, n)
                              : i % 3 == 1 ? random::isotropic(rng, n)
                                           : random::coisotropic(rng, n);
    const LinearStructure t = twist(s);
    EXPECT_EQ(t.class_tag(), s.class_tag());
    EXPECT_TRUE(equals(twist(t), s));
  }
}

// graph(ω) = {(v, ωv)}; twisted it is {(ωv, v)} = {(α, ω⁻¹α)}.
TEST(Twist, GraphOfInvertibleFormIsGraphOfInverse) {
  random::Rng rng(37);
  for (int i = 0; i < 20; ++i) {
    const Index n = 2 * random::uniform_int(rng, 1, 3);
    const Matrix q = random::orthogonal(rng, n);
    Matrix s = Matrix::Zero(n, n);
    for (Index k = 0; k < n / 2; ++k) {
      s(2 * k, 2 * k + 1) = -random::magnitude(rng);
      s(2 * k + 1, 2 * k) = -s(2 * k, 2 * k + 1);
    }
    const Matrix w = q * s * q.transpose();
    Matrix inv = w.inverse();
    inv = 0.5 * (inv - inv.transpose());
    EXPECT_TRUE(equals(twist(graph(TwoForm(w))), graph(TwoForm(inv))));
    EXPECT_TRUE(equals(twist(graph(TwoForm(w))), graph(Bivector(w))));
  }
}

TEST(RangeAndForm, FPlusAnnihilatorHasZeroForm) {
  random::Rng rng(41);
  for (int i = 0; i < 20; ++i) {
    const Index n = random::uniform_int(rng, 1, 5);
    const Subspace f = random::subspace(rng, n);
    const RangeAndForm rf = range_and_form(from_pair(f, TwoForm::zero(n)));
    EXPECT_TRUE(equals(rf.range, f));
    EXPECT_LE(rf.omega.mat.norm(), 1e-12);
  }
}

TEST(RangeAndForm, GraphRecoversTheForm) {
  random::Rng rng(43);
  for (int i = 0; i < 20; ++i) {
    const Index n = random::uniform_int(rng, 1, 5);
    const Matrix w = random::skew(rng, n);
    const RangeAndForm rf = range_and_form(graph(TwoForm(w)));
    ASSERT_EQ(rf.range.dim(), n);
    // Back to standard coordinates.
    EXPECT_LE((extend_form(rf.range, rf.omega).mat - w).norm(), 1e-9);
  }
}

TEST(RangeAndForm, RoundTripThroughFromPair) {
  random::Rng rng(47);
  for (int i = 0; i < 100; ++i) {
    const LinearStructure d = random::dirac(rng, random::uniform_int(rng, 1, 6));
    const RangeAndForm rf = range_and_form(d);
    EXPECT_TRUE(equals(from_pair(rf.range, extend_form(rf.range, rf.omega)), d));
  }
}

TEST(RangeAndForm, IsotropicInputAccepted) {
  random::Rng rng(53);
  for (int i = 0; i < 20; ++i) EXPECT_NO_THROW(range_and_form(random::isotropic(rng, 4)));
}

TEST(RangeAndForm, NonIsotropicRejected) {
  EXPECT_THROW(range_and_form(blocks({{1, 0, 1, 0}})), ClassError);
  EXPECT_THROW(range_and_form(full_structure(2)), ClassError);
}

TEST(IsotropicDecompose, ZeroStructure) {
  const IsotropicParts p = isotropic_decompose(LinearStructure(Subspace::zero(4)));
  EXPECT_EQ(p.f.dim(), 0);
  EXPECT_TRUE(equals(p.f1, Subspace::full(2)));
  EXPECT_TRUE(equals(p.f2, Subspace::full(2)));
}

TEST(IsotropicDecompose, SingleFlowLine) {
  const LinearStructure s = blocks({{1, 0, 0, 0}});
  const IsotropicParts p = isotropic_decompose(s);
  const Subspace e1 = Subspace::span_of(Vector::Unit(2, 0)), e2 = Subspace::span_of(Vector::Unit(2, 1));
  EXPECT_TRUE(equals(p.f, e1));
  EXPECT_LE(p.omega_f.mat.norm(), 1e-14);
  EXPECT_TRUE(equals(p.f1, e2));
  EXPECT_TRUE(equals(p.f2, e2));
  EXPECT_TRUE(equals(pairing_orthogonal(s), blocks({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 0, 1}})));
  EXPECT_TRUE(equals(reconstruct(p), s));
}

TEST(IsotropicDecompose, DiracHasNoF2) {
  random::Rng rng(59);
  for (int i = 0; i < 50; ++i) {
    const LinearStructure d = random::dirac(rng, random::uniform_int(rng, 1, 6));
    const IsotropicParts p = isotropic_decompose(d);
    EXPECT_EQ(p.f2.dim(), 0);
    EXPECT_TRUE(equals(reconstruct(p), d));
  }
}

TEST(IsotropicDecompose, RoundTripAndPerpProjection) {
  random::Rng rng(61);
  for (int i = 0; i < 100; ++i) {
    const LinearStructure s = random::isotropic(rng, random::uniform_int(rng, 1, 6));
    const IsotropicParts p = isotropic_decompose(s);
    EXPECT_TRUE(is_subset(p.f2, p.f1));
    EXPECT_TRUE(equals(reconstruct(p), s));
    // The flows of Σ^⊥ are F ⊕ F2.
    EXPECT_TRUE(equals(pairing_orthogonal(s).flow_projection(), sum(p.f, p.f2)));
  }
}

TEST(IsotropicDecompose, RejectsNonIsotropic) {
  EXPECT_THROW(isotropic_decompose(full_structure(2)), ClassError);
}

TEST(CoisotropicDecompose, FullSpace) {
  const CoisotropicParts c = coisotropic_decompose(full_structure(3));
  EXPECT_EQ(c.perp.f.dim(), 0);
  EXPECT_TRUE(equals(c.perp.f2, Subspace::full(3)));
  EXPECT_TRUE(equals(c.perp.f1, Subspace::full(3)));
  EXPECT_EQ(c.f3.dim(), 0);
  EXPECT_TRUE(equals(reconstruct(c), full_structure(3)));
}

TEST(CoisotropicDecompose, DiracIsMinimal) {
  random::Rng rng(67);
  for (int i = 0; i < 50; ++i) {
    const LinearStructure d = random::dirac(rng, random::uniform_int(rng, 1, 5));
    const CoisotropicParts c = coisotropic_decompose(d);
    EXPECT_EQ(c.perp.f2.dim(), 0);
    EXPECT_TRUE(equals(reconstruct(c), d));
  }
}

// D ⊕ (F2 ⊕ F2*) with D Dirac on a complement of F2; F2 must come back.
TEST(CoisotropicDecompose, RecoversConstructedF2) {
  random::Rng rng(71);
  for (int i = 0; i < 50; ++i) {
    const Index n = random::uniform_int(rng, 2, 6), k = random::uniform_int(rng, 1, n - 1);
    const Matrix q = random::orthogonal(rng, n);
    const Subspace f2 = Subspace::from_orthonormal(q.rightCols(k));
    const Subspace rest = Subspace::from_orthonormal(q.leftCols(n - k));
    // A Dirac structure on `rest`, written in R^n.
    const LinearStructure small = random::dirac(rng, n - k);
    Matrix flows = Matrix::Zero(n, n), efforts = Matrix::Zero(n, n);
    flows.leftCols(n - k) = rest.basis() * small.flow_block();
    efforts.leftCols(n - k) = rest.basis() * small.effort_block();
    flows.block(0, n - k, n, k) = f2.basis();
    Matrix all_flows(n, n + k), all_efforts(n, n + k);
    all_flows << flows, Matrix::Zero(n, k);
    all_efforts << efforts.leftCols(n - k), Matrix::Zero(n, k), f2.basis();
    const LinearStructure s = LinearStructure::from_blocks(all_flows, all_efforts);
    ASSERT_EQ(s.class_tag(), StructureClass::coisotropic);
    const CoisotropicParts c = coisotropic_decompose(s);
    EXPECT_TRUE(equals(c.perp.f2, f2));
    EXPECT_TRUE(equals(sum(c.perp.f2, c.f3), c.perp.f1));
    EXPECT_TRUE(equals(reconstruct(c), s));
  }
}

TEST(CoisotropicDecompose, RoundTripOnRandomInputs) {
  random::Rng rng(73);
  for (int i = 0; i < 100; ++i) {
    const LinearStructure s = random::coisotropic(rng, random::uniform_int(rng, 1, 6));
    EXPECT_TRUE(equals(reconstruct(coisotropic_decompose(s)), s));
  }
}

TEST(CoisotropicDecompose, RejectsNonCoisotropic) {
  EXPECT_THROW(coisotropic_decompose(LinearStructure(Subspace::zero(4))), ClassError);
}

TEST(DirectProduct, DimensionsAndClass) {
  random::Rng rng(79);
  const LinearStructure a = random::dirac(rng, 2), b = random::dirac(rng, 3);
  const LinearStructure p = direct_product(a, b);
  EXPECT_EQ(p.n(), 5);
  EXPECT_TRUE(p.is_dirac());
  EXPECT_THROW(direct_product(std::vector<LinearStructure>{}), DimensionError);
}

TEST(StandardSymplectic, FlatConvention) {
  const TwoForm w(standard_symplectic());
  EXPECT_DOUBLE_EQ(w(Vector::Unit(2, 0), Vector::Unit(2, 1)), 1.0);
  EXPECT_DOUBLE_EQ(w(Vector::Unit(2, 1), Vector::Unit(2, 0)), -1.0);
}
