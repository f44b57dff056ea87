#include "dirac/random.hpp"
#include "dirac/subspace.hpp"

#include <gtest/gtest.h>

#include <Eigen/LU>

using namespace dirac;

namespace {

// Rank through a full-pivot LU, independent of the SVD used by the library.
Index lu_rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(1e-9);
  return lu.rank();
}

Matrix cols(std::initializer_list<std::initializer_list<double>> c) {
  const Index k = static_cast<Index>(c.begin()->size());
  Matrix m(k, static_cast<Index>(c.size()));
  Index j = 0;
  for (const auto& col : c) {
    Index i = 0;
    for (double v : col) m(i++, j) = v;
    ++j;
  }
  return m;
}

Subspace span(std::initializer_list<std::initializer_list<double>> c) { return canonicalize(cols(c)); }

double orthonormality_defect(const Subspace& s) {
  if (s.dim() == 0) return 0.0;
  return (s.basis().transpose() * s.basis() - Matrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Canonicalize, ZeroMatrixGivesZeroSubspace) {
  const Subspace s = canonicalize(Matrix::Zero(3, 2));
  EXPECT_EQ(s.ambient_dim(), 3);
  EXPECT_EQ(s.dim(), 0);
}

TEST(Canonicalize, IdentityGivesFullSpace) {
  const Subspace s = canonicalize(Matrix::Identity(2, 2));
  EXPECT_EQ(s.dim(), 2);
  EXPECT_TRUE(equals(s, Subspace::full(2)));
}

TEST(Canonicalize, DependentColumnsCollapse) {
  const Subspace s = span({{1, 2, 0}, {2, 4, 0}});
  ASSERT_EQ(s.dim(), 1);
  Vector u(3);
  u << 1, 2, 0;
  u /= std::sqrt(5.0);
  EXPECT_NEAR(std::abs(s.basis().col(0).dot(u)), 1.0, 1e-14);
  EXPECT_EQ(s.dim(), lu_rank(cols({{1, 2, 0}, {2, 4, 0}})));
}

TEST(Canonicalize, RejectsEmptyAmbient) { EXPECT_THROW(canonicalize(Matrix(0, 2)), DimensionError); }

TEST(Canonicalize, RankFollowsPolicy) {
  Matrix m = Matrix::Identity(3, 2);
  m(1, 1) = 1e-11;
  EXPECT_EQ(canonicalize(m).dim(), 1);
  const NumericPolicy saved = numeric_policy();
  numeric_policy().rank_rel_tol = 1e-13;
  EXPECT_EQ(canonicalize(m).dim(), 2);
  numeric_policy() = saved;
}

TEST(Canonicalize, BasisIsOrthonormalOnRandomInput) {
  random::Rng rng(7);
  for (int i = 0; i < 50; ++i) {
    const Index k = random::uniform_int(rng, 1, 8), m = random::uniform_int(rng, 1, 8);
    const Matrix raw = random::matrix(rng, k, m);
    const Subspace s = canonicalize(raw);
    EXPECT_LE(orthonormality_defect(s), 1e-10);
    EXPECT_EQ(s.dim(), lu_rank(raw));
  }
}

TEST(Sum, CoordinateAxesFillThePlane) {
  EXPECT_TRUE(equals(sum(span({{1, 0}}), span({{0, 1}})), Subspace::full(2)));
}

TEST(Sum, ZeroIsNeutral) {
  const Subspace a = span({{1, 2, 3}, {0, 1, 1}});
  EXPECT_TRUE(equals(sum(a, Subspace::zero(3)), a));
}

TEST(Sum, DimensionMismatchThrows) { EXPECT_THROW(sum(Subspace::full(2), Subspace::full(3)), DimensionError); }

TEST(Intersect, OverlappingCoordinatePlanes) {
  const Subspace r = intersect(span({{1, 0, 0}, {0, 1, 0}}), span({{0, 1, 0}, {0, 0, 1}}));
  EXPECT_TRUE(equals(r, span({{0, 1, 0}})));
}

TEST(Intersect, FullSpaceIsNeutral) {
  const Subspace a = span({{1, 1, 0, 2}});
  EXPECT_TRUE(equals(intersect(a, Subspace::full(4)), a));
}

TEST(Intersect, DimensionMismatchThrows) {
  EXPECT_THROW(intersect(Subspace::full(2), Subspace::full(3)), DimensionError);
}

// dim A + dim B = dim(A + B) + dim(A ∩ B), with the sum's rank taken from an
// LU of the stacked bases and the intersection checked to lie in both.
TEST(Grassmann, IdentityOnRandomPairs) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    random::Rng rng(seed);
    const Index k = random::uniform_int(rng, 1, 7);
    const Subspace a = random::subspace(rng, k);
    // Share a random piece of A with B so intersections are often nontrivial.
    Matrix braw(k, 0);
    const Index shared = random::uniform_int(rng, 0, a.dim());
    const Index own = random::uniform_int(rng, 0, k);
    braw.resize(k, shared + own);
    if (shared > 0) braw.leftCols(shared) = a.basis() * random::matrix(rng, a.dim(), shared);
    if (own > 0) braw.rightCols(own) = random::matrix(rng, k, own);
    const Subspace b = canonicalize(braw);
    Matrix stacked(k, a.dim() + b.dim());
    stacked << a.basis(), b.basis();
    const Index sum_rank = lu_rank(stacked);
    const Subspace s = sum(a, b), i = intersect(a, b);
    EXPECT_EQ(s.dim(), sum_rank) << "seed " << seed;
    EXPECT_EQ(a.dim() + b.dim(), s.dim() + i.dim()) << "seed " << seed;
    EXPECT_TRUE(is_subset(i, a)) << "seed " << seed;
    EXPECT_TRUE(is_subset(i, b)) << "seed " << seed;
    EXPECT_LE(orthonormality_defect(s), 1e-10);
    EXPECT_LE(orthonormality_defect(i), 1e-10);
  }
}

TEST(Annihilator, OfZeroIsEverything) { EXPECT_TRUE(equals(annihilator(Subspace::zero(2)), Subspace::full(2))); }

TEST(Annihilator, OfEverythingIsZero) { EXPECT_EQ(annihilator(Subspace::full(4)).dim(), 0); }

TEST(Annihilator, OfAllOnesVector) {
  const Subspace ann = annihilator(span({{1, 1, 1, 1}}));
  ASSERT_EQ(ann.dim(), 3);
  // Oracle: null space of the row (1, 1, 1, 1) through LU.
  Eigen::FullPivLU<Matrix> lu(Matrix::Ones(1, 4));
  EXPECT_TRUE(equals(ann, canonicalize(lu.kernel())));
  EXPECT_NEAR((Matrix::Ones(1, 4) * ann.basis()).norm(), 0.0, 1e-14);
}

TEST(Annihilator, IsAnInvolution) {
  random::Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Index n = random::uniform_int(rng, 1, 7);
    const Subspace f = random::subspace(rng, n);
    const Subspace ann = annihilator(f);
    EXPECT_EQ(ann.dim(), n - f.dim());
    EXPECT_TRUE(equals(annihilator(ann), f));
  }
}

TEST(PairingOrthogonal, PureFlowsAreSelfOrthogonal) {
  for (Index n = 1; n <= 4; ++n) {
    Matrix flows = Matrix::Zero(2 * n, n);
    flows.topRows(n).setIdentity();
    const Subspace s = canonicalize(flows);
    EXPECT_TRUE(equals(pairing_orthogonal(s), s));
  }
}

TEST(PairingOrthogonal, FullSpaceHasZeroOrthogonal) {
  EXPECT_EQ(pairing_orthogonal(Subspace::full(6)).dim(), 0);
}

TEST(PairingOrthogonal, OddAmbientThrows) { EXPECT_THROW(pairing_orthogonal(Subspace::full(3)), DimensionError); }

TEST(PairingOrthogonal, DimensionsAndInvolution) {
  random::Rng rng(13);
  for (int i = 0; i < 100; ++i) {
    const Index n = random::uniform_int(rng, 1, 5);
    const Subspace s = random::subspace(rng, 2 * n);
    const Subspace perp = pairing_orthogonal(s);
    EXPECT_EQ(s.dim() + perp.dim(), 2 * n);
    // Oracle: every pair of basis vectors pairs to zero through P.
    if (s.dim() > 0 && perp.dim() > 0)
      EXPECT_LE((s.basis().transpose() * pairing_matrix(n) * perp.basis()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_TRUE(equals(pairing_orthogonal(perp), s));
  }
}

TEST(Equals, Reflexive) {
  const Subspace a = span({{1, 2}, {3, 1}});
  EXPECT_TRUE(equals(a, a));
}

TEST(Equals, ScaleInvariant) { EXPECT_TRUE(equals(span({{1, 0}}), span({{2, 0}}))); }

TEST(Equals, SmallTiltIsDetected) {
  const Subspace a = span({{1, 0}});
  const Subspace b = span({{1, 1e-6}});
  EXPECT_GT(projector_distance(a, b), 1e-9);
  EXPECT_FALSE(equals(a, b));
}

TEST(Equals, DimensionMismatchThrows) { EXPECT_THROW(equals(Subspace::full(2), Subspace::full(3)), DimensionError); }

TEST(NullSpace, MatchesLuKernel) {
  random::Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const Index r = random::uniform_int(rng, 1, 6), c = random::uniform_int(rng, 1, 6);
    const Matrix m = random::map(rng, r, c, random::uniform_int(rng, 0, std::min(r, c)));
    const Subspace k = null_space(m);
    EXPECT_EQ(k.dim(), c - lu_rank(m));
    if (k.dim() > 0) EXPECT_LE((m * k.basis()).norm(), 1e-12);
  }
}

TEST(CoordinateProjection, TakesTheRequestedBlock) {
  const Subspace s = span({{1, 0, 1, 0}, {0, 1, 0, 0}});
  EXPECT_TRUE(equals(coordinate_projection(s, 0, 2), Subspace::full(2)));
  EXPECT_TRUE(equals(coordinate_projection(s, 2, 2), span({{1, 0}})));
  EXPECT_THROW(coordinate_projection(s, 3, 2), DimensionError);
}
