#include "outctrl/numerics.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "outctrl/lti_model.hpp"
#include "support/oracles.hpp"

namespace outctrl {
namespace {

constexpr double kEps = 2.220446049250313e-16;

GTEST_TEST(RankOfTest, IdentityHasFullRank) {
  EXPECT_EQ(rank_of(Matrix::Identity(3, 3)).rank, 3);
}

GTEST_TEST(RankOfTest, ZeroMatrixHasRankZero) {
  const RankResult rr = rank_of(Matrix::Zero(2, 4));
  EXPECT_EQ(rr.rank, 0);
  EXPECT_EQ(rr.singular_values.size(), 2);
}

GTEST_TEST(RankOfTest, TinySingularValueFallsBelowDefaultCutoff) {
  // Singular values are 1 and 1e-18; the cutoff is eps * 2 * 1 ~ 4.4e-16.
  Matrix M(2, 2);
  M << 1.0, 0.0, 0.0, 1e-18;
  const RankResult rr = rank_of(M);
  EXPECT_EQ(rr.rank, 1);
  EXPECT_NEAR(rr.threshold, kEps * 2.0, 1e-18);
  EXPECT_NEAR(rr.singular_values(0), 1.0, 1e-15);
  EXPECT_NEAR(rr.singular_values(1), 1e-18, 1e-24);
}

GTEST_TEST(RankOfTest, LooserToleranceLowersTheRank) {
  Matrix M(2, 2);
  M << 1.0, 0.0, 0.0, 1e-6;
  ToleranceConfig loose;
  loose.rank_rtol = 1e-4;
  EXPECT_EQ(rank_of(M).rank, 2);
  EXPECT_EQ(rank_of(M, loose).rank, 1);
}

GTEST_TEST(RankOfTest, AbsoluteFloorOverridesRelativeCutoff) {
  Matrix M(2, 2);
  M << 1.0, 0.0, 0.0, 1e-6;
  EXPECT_EQ(rank_of(M, {}, 1e-3).rank, 1);
  EXPECT_DOUBLE_EQ(rank_of(M, {}, 1e-3).threshold, 1e-3);
}

GTEST_TEST(RankOfTest, AdjointHasTheSameRank) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Matrix M = random_gaussian_matrix(4, 6, seed);
    EXPECT_EQ(rank_of(M).rank, rank_of(M.adjoint()).rank);
    // Rank-deficient products too.
    const Matrix low = random_gaussian_matrix(5, 2, seed) *
                       random_gaussian_matrix(2, 3, seed + 1000);
    EXPECT_EQ(rank_of(low).rank, 2);
    EXPECT_EQ(rank_of(low.adjoint()).rank, 2);
  }
}

GTEST_TEST(RankOfTest, RejectsBadTolerancesAndValues) {
  ToleranceConfig bad;
  bad.rank_rtol = 0.0;
  EXPECT_THROW(rank_of(Matrix::Identity(2, 2), bad), DomainError);
  Matrix M(1, 1);
  M(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(rank_of(M), DomainError);
}

GTEST_TEST(SpectrumOfTest, TriangularMultiplicityTwo) {
  Matrix A = Matrix::Zero(3, 3);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  A(2, 2) = 2.0;
  const Spectrum spec = spectrum_of(A);
  ASSERT_EQ(spec.clusters.size(), 2u);
  EXPECT_NEAR(std::abs(spec.clusters[0].value - Complex(1.0, 0.0)), 0.0, 1e-12);
  EXPECT_EQ(spec.clusters[0].multiplicity, 1);
  EXPECT_NEAR(std::abs(spec.clusters[1].value - Complex(2.0, 0.0)), 0.0, 1e-12);
  EXPECT_EQ(spec.clusters[1].multiplicity, 2);
  EXPECT_EQ(spec.total_multiplicity(), 3);
}

GTEST_TEST(SpectrumOfTest, RotationHasConjugateImaginaryPair) {
  Matrix A(2, 2);
  A << 0.0, 1.0, -1.0, 0.0;
  const Spectrum spec = spectrum_of(A);
  ASSERT_EQ(spec.clusters.size(), 2u);
  // Sorted by (re, im): -i before +i.
  EXPECT_NEAR(std::abs(spec.clusters[0].value - Complex(0.0, -1.0)), 0.0,
              1e-12);
  EXPECT_NEAR(std::abs(spec.clusters[1].value - Complex(0.0, 1.0)), 0.0,
              1e-12);
  EXPECT_LT(spec.backward_error, 1e-14);
}

GTEST_TEST(SpectrumOfTest, ScalarZero) {
  const Spectrum spec = spectrum_of(Matrix::Zero(1, 1));
  ASSERT_EQ(spec.clusters.size(), 1u);
  EXPECT_EQ(spec.clusters[0].multiplicity, 1);
  EXPECT_NEAR(std::abs(spec.clusters[0].value), 0.0, 1e-15);
}

GTEST_TEST(SpectrumOfTest, DefectiveEigenvalueStaysOneCluster) {
  // Similarity-transformed Jordan block: the computed eigenvalues scatter on
  // a ring of radius ~eps^(1/3) around 0.7, far outside any fixed tolerance;
  // conditioning-aware clustering must still fuse them.
  Matrix J = Matrix::Zero(3, 3);
  for (int i = 0; i < 3; ++i) J(i, i) = 0.7;
  J(0, 1) = 1.0;
  J(1, 2) = 1.0;
  const Matrix T = random_gaussian_matrix(3, 3, 7);
  const Matrix A = T * J * T.inverse();
  const Spectrum spec = spectrum_of(A);
  ASSERT_EQ(spec.clusters.size(), 1u);
  EXPECT_EQ(spec.clusters[0].multiplicity, 3);
  EXPECT_NEAR(std::abs(spec.clusters[0].value - Complex(0.7, 0.0)), 0.0, 1e-4);
}

GTEST_TEST(SpectrumOfTest, SimilarityInvariantWithinTolerance) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Matrix A = random_gaussian_matrix(5, 5, seed);
    // Draw a similarity with condition number at most 100.
    Matrix T;
    for (std::uint64_t attempt = 0;; ++attempt) {
      T = random_gaussian_matrix(5, 5, 10000 + 100 * seed + attempt);
      Eigen::JacobiSVD<Matrix> svd(T);
      if (svd.singularValues().maxCoeff() <=
          100.0 * svd.singularValues().minCoeff()) {
        break;
      }
    }
    const Matrix similar = T * A * T.inverse();
    const Spectrum sa = spectrum_of(A);
    const Spectrum sb = spectrum_of(similar);
    // Expand clusters into full multisets and compare in sorted order.
    std::vector<Complex> ea, eb;
    for (const auto& c : sa.clusters) {
      ea.insert(ea.end(), c.multiplicity, c.value);
    }
    for (const auto& c : sb.clusters) {
      eb.insert(eb.end(), c.multiplicity, c.value);
    }
    ASSERT_EQ(ea.size(), eb.size());
    auto lex = [](const Complex& x, const Complex& y) {
      if (x.real() != y.real()) return x.real() < y.real();
      return x.imag() < y.imag();
    };
    std::sort(ea.begin(), ea.end(), lex);
    std::sort(eb.begin(), eb.end(), lex);
    for (size_t i = 0; i < ea.size(); ++i) {
      EXPECT_LT(std::abs(ea[i] - eb[i]), 1e-6 * (1.0 + A.norm()));
    }
  }
}

GTEST_TEST(SpectrumOfTest, ClustersStayClusterSeparated) {
  ToleranceConfig tol;
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    const Matrix A = random_gaussian_matrix(6, 6, seed);
    const Spectrum spec = spectrum_of(A, tol);
    EXPECT_EQ(spec.total_multiplicity(), 6);
    for (size_t i = 0; i < spec.clusters.size(); ++i) {
      for (size_t j = i + 1; j < spec.clusters.size(); ++j) {
        EXPECT_GT(std::abs(spec.clusters[i].value - spec.clusters[j].value),
                  tol.eig_cluster_atol);
      }
    }
  }
}

GTEST_TEST(SpectrumOfTest, RejectsNonSquare) {
  EXPECT_THROW(spectrum_of(Matrix::Zero(2, 3)), DimensionError);
}

GTEST_TEST(ExpmTest, ZeroMatrixGivesIdentity) {
  EXPECT_NEAR((expm(Matrix::Zero(4, 4)) - Matrix::Identity(4, 4)).norm(), 0.0,
              1e-15);
}

GTEST_TEST(ExpmTest, DiagonalCase) {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  const Matrix E = expm(A);
  EXPECT_NEAR(std::abs(E(0, 0) - std::exp(1.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(E(1, 1) - std::exp(2.0)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(E(0, 1)) + std::abs(E(1, 0)), 0.0, 1e-14);
}

GTEST_TEST(ExpmTest, NilpotentSeriesTerminates) {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 1) = 1.0;
  Matrix expected = Matrix::Identity(2, 2);
  expected(0, 1) = 1.0;
  EXPECT_NEAR((expm(A) - expected).norm(), 0.0, 1e-15);
}

GTEST_TEST(ExpmTest, InverseIdentityOnModerateNorms) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Matrix A = random_gaussian_matrix(6, 6, 55000 + seed);
    A *= (1.0 + static_cast<double>(seed % 5)) / A.norm();  // |A| in [1, 5]
    const Matrix E = expm(A);
    const Matrix E_inv = expm(Matrix(-A));
    EXPECT_LT((E * E_inv - Matrix::Identity(6, 6)).norm(), 1e-10 * E.norm());
  }
}

GTEST_TEST(ExpmTest, MatchesDiagonalizationOracle) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Matrix A = random_gaussian_matrix(5, 5, 91000 + seed);
    const Matrix E = expm(A);
    const Matrix reference = test::eig_expm(A);
    EXPECT_LT((E - reference).norm(), 1e-10 * reference.norm());
  }
}

GTEST_TEST(ExpmTest, LargeNormTriggersSquaringAndStaysAccurate) {
  Matrix A = random_gaussian_matrix(4, 4, 1234);
  A *= 40.0 / A.norm();
  const Matrix E = expm(A);
  const Matrix half = expm(Matrix(0.5 * A));
  EXPECT_LT((half * half - E).norm(), 1e-9 * E.norm());
}

GTEST_TEST(StateGramianTest, ScalarIntegratorClosedForm) {
  const Matrix P =
      state_gramian(Matrix::Zero(1, 1), Matrix::Identity(1, 1), 2.0);
  EXPECT_NEAR(std::abs(P(0, 0) - 2.0), 0.0, 1e-13);
}

GTEST_TEST(StateGramianTest, ZeroInputGivesZeroGramian) {
  const Matrix A = random_gaussian_matrix(3, 3, 5);
  const Matrix P = state_gramian(A, Matrix::Zero(3, 2), 1.5);
  EXPECT_NEAR(P.norm(), 0.0, 1e-14);
}

GTEST_TEST(StateGramianTest, StableScalarSaturatesAtOneHalf) {
  Matrix A(1, 1);
  A(0, 0) = -1.0;
  const Matrix P = state_gramian(A, Matrix::Identity(1, 1), 20.0);
  EXPECT_NEAR(std::abs(P(0, 0) - 0.5), 0.0, 1e-8);
}

GTEST_TEST(StateGramianTest, HermitianAndPsd) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix A = random_gaussian_matrix(4, 4, 300 + seed);
    const Matrix B = random_gaussian_matrix(4, 2, 600 + seed);
    const Matrix P = state_gramian(A, B, 1.0);
    EXPECT_NEAR((P - P.adjoint()).norm(), 0.0, 1e-12 * (1.0 + P.norm()));
    Eigen::SelfAdjointEigenSolver<Matrix> es(P);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12 * (1.0 + P.norm()));
  }
}

GTEST_TEST(StateGramianTest, MonotoneInTheHorizon) {
  const ToleranceConfig tol;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    const Matrix A = random_gaussian_matrix(4, 4, 900 + seed);
    const Matrix B = random_gaussian_matrix(4, 1, 1800 + seed);
    const Matrix P1 = state_gramian(A, B, 0.4);
    const Matrix P2 = state_gramian(A, B, 1.7);
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(P2 - P1));
    EXPECT_GT(es.eigenvalues().minCoeff(),
              -tol.psd_atol * (1.0 + P2.norm()));
  }
}

GTEST_TEST(StateGramianTest, MatchesAdaptiveQuadrature) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix A = random_gaussian_matrix(5, 5, 2700 + seed);
    const Matrix B = random_gaussian_matrix(5, 2, 5400 + seed);
    const Matrix P = state_gramian(A, B, 1.0);
    const Matrix reference = test::quadrature_state_gramian(A, B, 1.0);
    EXPECT_LT((P - reference).norm(), 1e-8 * reference.norm());
  }
}

GTEST_TEST(StateGramianTest, LongHorizonStableSystemMatchesQuadrature) {
  // Large |A| t exercises the doubling path.
  Matrix A = random_gaussian_matrix(4, 4, 77);
  A -= Matrix::Identity(4, 4) *
       (spectrum_of(A).clusters.back().value.real() + 0.3);
  const Matrix B = random_gaussian_matrix(4, 2, 78);
  const Matrix P = state_gramian(A, B, 10.0);
  const Matrix reference = test::quadrature_state_gramian(A, B, 10.0);
  EXPECT_LT((P - reference).norm(), 1e-8 * reference.norm());
}

GTEST_TEST(StateGramianTest, RejectsBadArguments) {
  EXPECT_THROW(state_gramian(Matrix::Zero(2, 3), Matrix::Zero(2, 1), 1.0),
               DimensionError);
  EXPECT_THROW(state_gramian(Matrix::Zero(2, 2), Matrix::Zero(3, 1), 1.0),
               DimensionError);
  EXPECT_THROW(state_gramian(Matrix::Zero(2, 2), Matrix::Zero(2, 1), 0.0),
               DomainError);
  EXPECT_THROW(state_gramian(Matrix::Zero(2, 2), Matrix::Zero(2, 1), -1.0),
               DomainError);
}

GTEST_TEST(ImageEqualTest, ReflexiveOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix M = random_gaussian_matrix(4, 3, 7000 + seed);
    const ImageComparison cmp = image_equal(M, M);
    EXPECT_TRUE(cmp.equal);
    EXPECT_LT(cmp.max_principal_angle, 1e-7);
  }
}

GTEST_TEST(ImageEqualTest, SymmetricOnRandomInputs) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix M1 = random_gaussian_matrix(5, 2, 7100 + seed);
    const Matrix M2 = random_gaussian_matrix(5, 3, 7200 + seed);
    const ImageComparison ab = image_equal(M1, M2);
    const ImageComparison ba = image_equal(M2, M1);
    EXPECT_EQ(ab.equal, ba.equal);
    EXPECT_NEAR(ab.max_principal_angle, ba.max_principal_angle, 1e-9);
  }
}

GTEST_TEST(ImageEqualTest, OrthogonalLinesDiffer) {
  Matrix e1(2, 1), e2(2, 1);
  e1 << 1.0, 0.0;
  e2 << 0.0, 1.0;
  const ImageComparison cmp = image_equal(e1, e2);
  EXPECT_FALSE(cmp.equal);
  EXPECT_NEAR(cmp.max_principal_angle, M_PI / 2.0, 1e-12);
}

GTEST_TEST(ImageEqualTest, SameSpanDifferentShapes) {
  Matrix M1(2, 2), M2(2, 1);
  M1 << 1.0, 1.0, 0.0, 0.0;
  M2 << 2.0, 0.0;
  const ImageComparison cmp = image_equal(M1, M2);
  EXPECT_TRUE(cmp.equal);
  EXPECT_EQ(cmp.rank_lhs, 1);
  EXPECT_EQ(cmp.rank_rhs, 1);
}

GTEST_TEST(ImageEqualTest, RankMismatchIsNotEqual) {
  const Matrix full = random_gaussian_matrix(4, 4, 9);
  const Matrix thin = random_gaussian_matrix(4, 2, 10);
  const ImageComparison cmp = image_equal(full, thin);
  EXPECT_FALSE(cmp.equal);
  EXPECT_EQ(cmp.rank_lhs, 4);
  EXPECT_EQ(cmp.rank_rhs, 2);
}

GTEST_TEST(ImageEqualTest, RotatedBasisOfSameSubspace) {
  const Matrix basis = random_gaussian_matrix(6, 3, 11);
  const Matrix mixer = random_gaussian_matrix(3, 3, 12);
  const ImageComparison cmp = image_equal(basis, basis * mixer);
  EXPECT_TRUE(cmp.equal);
  EXPECT_LT(cmp.max_principal_angle, 1e-7);
}

GTEST_TEST(SolveHermitianTest, IdentityReturnsRhs) {
  const Vector b = random_gaussian_matrix(3, 1, 13).col(0);
  const HermitianSolveResult r = solve_hermitian(Matrix::Identity(3, 3), b);
  EXPECT_LT((r.solution - b).norm(), 1e-13);
  EXPECT_LT(r.residual, 1e-13);
}

GTEST_TEST(SolveHermitianTest, SingularDirectionIsPseudoInverted) {
  Matrix W = Matrix::Zero(2, 2);
  W(0, 0) = 2.0;
  Vector rhs(2);
  rhs << 4.0, 0.0;
  const HermitianSolveResult r = solve_hermitian(W, rhs);
  EXPECT_NEAR(std::abs(r.solution(0) - 2.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(r.solution(1)), 0.0, 1e-14);
  EXPECT_NEAR(r.residual, 0.0, 1e-14);
}

GTEST_TEST(SolveHermitianTest, ComponentOutsideImageThrows) {
  Matrix W = Matrix::Zero(2, 2);
  W(0, 0) = 2.0;
  Vector rhs(2);
  rhs << 0.0, 1.0;
  try {
    solve_hermitian(W, rhs);
    FAIL() << "expected TargetUnreachableError";
  } catch (const TargetUnreachableError& e) {
    EXPECT_NEAR(e.residual(), 1.0, 1e-12);
  }
}

GTEST_TEST(SolveHermitianTest, RandomHermitianSystemsSolve) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix G = random_gaussian_matrix(4, 4, 8800 + seed);
    const Matrix W = G * G.adjoint() + Matrix::Identity(4, 4);
    const Vector b = random_gaussian_matrix(4, 1, 9900 + seed).col(0);
    const HermitianSolveResult r = solve_hermitian(W, b);
    EXPECT_LT((W * r.solution - b).norm(), 1e-10 * (1.0 + b.norm()));
  }
}

GTEST_TEST(SolveHermitianTest, RejectsNonHermitianInput) {
  Matrix W(2, 2);
  W << 1.0, 2.0, 0.0, 1.0;
  Vector rhs = Vector::Ones(2);
  EXPECT_THROW(solve_hermitian(W, rhs), DomainError);
  EXPECT_THROW(solve_hermitian(Matrix::Identity(2, 2), Vector::Ones(3)),
               DimensionError);
}

GTEST_TEST(ToleranceConfigTest, ValidatesOpenUnitInterval) {
  ToleranceConfig tol;
  EXPECT_NO_THROW(tol.validate());
  tol.psd_atol = 1.0;
  EXPECT_THROW(tol.validate(), DomainError);
  tol.psd_atol = 1e-12;
  tol.eig_cluster_atol = -1e-3;
  EXPECT_THROW(tol.validate(), DomainError);
}

}  // namespace
}  // namespace outctrl
