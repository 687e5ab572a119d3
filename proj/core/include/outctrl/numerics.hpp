#pragma once

#include "outctrl/types.hpp"

namespace outctrl {

/// Result of a singular-value rank decision.
struct RankResult {
  int rank = 0;
  /// Singular values in descending order.
  RealVector singular_values;
  /// The cutoff that was applied: values strictly above it count.
  double threshold = 0.0;
};

/// Numerical rank of M.  The cutoff is
/// `max(tol.rank_rtol * max(rows, cols) * sigma_max, abs_floor)`; the
/// optional absolute floor lets callers fold exogenous uncertainty (for
/// example eigenvalue error) into the decision.
RankResult rank_of(const Matrix& M, const ToleranceConfig& tol = {},
                   double abs_floor = 0.0);

/// Eigenvalues of a square matrix, grouped into clusters.  Two computed
/// eigenvalues land in the same cluster when they are closer than
/// `max(tol.eig_cluster_atol * (1 + |A|_F), delta_i + delta_j)` where
/// delta_i is a per-eigenvalue accuracy estimate derived from eigenvector
/// conditioning; merging repeats until no pair of clusters qualifies.
/// The conditioning term is what keeps the multiplicity of a defective
/// eigenvalue intact: a Jordan block of size k splits under roundoff into a
/// ring of radius ~eps^(1/k), far beyond any fixed tolerance.
Spectrum spectrum_of(const Matrix& A, const ToleranceConfig& tol = {});

/// Matrix exponential e^A by scaling and squaring with diagonal Pade
/// approximants of degree 3/5/7/9/13, selected from the 1-norm of A.
Matrix expm(const Matrix& A);

/// Finite-horizon state controllability Gramian
///   P(t) = integral_0^t e^{sA} B B^* e^{sA^*} ds.
/// Computed from one augmented-block matrix exponential
///   exp([[-A, BB^*], [0, A^*]] tau) = [[F1, G1], [0, F2]],  P(tau) = F2^* G1,
/// evaluated at a step tau with |A|_F tau <= 2, then grown to t by the
/// doubling identity P(2s) = P(s) + e^{sA} P(s) e^{sA^*}.  The doubling adds
/// positive semidefinite terms only, so large |A| t cannot cancel.
Matrix state_gramian(const Matrix& A, const Matrix& B, double t);

/// Result of comparing the column spaces (images) of two matrices.
struct ImageComparison {
  bool equal = false;
  /// Largest principal angle between the two images, in radians.
  double max_principal_angle = 0.0;
  int rank_lhs = 0;
  int rank_rhs = 0;
};

/// Compares the images of M1 and M2 (same row count required).  Images are
/// reported equal when the ranks agree and the largest principal angle is at
/// most 100 * sqrt(tol.rank_rtol).
ImageComparison image_equal(const Matrix& M1, const Matrix& M2,
                            const ToleranceConfig& tol = {});

/// Solution of a Hermitian linear system by eigenvalue pseudo-inversion.
struct HermitianSolveResult {
  Vector solution;
  /// Norm of `W x - rhs` at the returned solution.
  double residual = 0.0;
};

/// Solves W x = rhs for Hermitian W.  Eigenvalues with magnitude at most
/// `tol.psd_atol * (1 + |W|_2)` are treated as zero (pseudo-inverse).  If the
/// residual of the pseudo-inverse solution exceeds
/// `sqrt(tol.psd_atol) * (1 + |rhs|)` the right-hand side is not in the range
/// of W and TargetUnreachableError is thrown.
HermitianSolveResult solve_hermitian(const Matrix& W, const Vector& rhs,
                                     const ToleranceConfig& tol = {});

/// Throws DomainError if any entry of M is NaN or infinite; `name` is used in
/// the error message.
void require_finite(const Matrix& M, const char* name);

}  // namespace outctrl
