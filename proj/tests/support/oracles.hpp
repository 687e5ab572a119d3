#pragma once

// Independent reference implementations used only by tests.  They share no
// code with the production paths they check: the exponential goes through an
// eigendecomposition instead of Pade scaling-and-squaring, and the Gramian
// through adaptive composite quadrature instead of the augmented block
// exponential.

#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "outctrl/types.hpp"

namespace outctrl::test {

/// e^A via diagonalization; valid for the diagonalizable (random) matrices
/// the tests draw.
inline Matrix eig_expm(const Matrix& A) {
  Eigen::ComplexEigenSolver<Matrix> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("oracle eigendecomposition failed");
  }
  const Matrix& V = es.eigenvectors();
  const Vector scaled = es.eigenvalues().array().exp();
  return V * scaled.asDiagonal() * V.inverse();
}

/// integral_0^t e^{sA} B B^* e^{sA^*} ds by composite Boole quadrature with
/// interval halving until the result stabilizes.
inline Matrix quadrature_state_gramian(const Matrix& A, const Matrix& B,
                                       double t, double rel_tol = 1e-11) {
  Eigen::ComplexEigenSolver<Matrix> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("oracle eigendecomposition failed");
  }
  const Matrix& V = es.eigenvectors();
  const Matrix V_inv = V.inverse();
  const Vector lambda = es.eigenvalues();
  const Matrix Q = B * B.adjoint();

  auto integrand = [&](double s) {
    const Vector phase = (lambda.array() * s).exp();
    const Matrix E = V * phase.asDiagonal() * V_inv;
    return Matrix(E * Q * E.adjoint());
  };

  auto composite_boole = [&](int intervals) {
    static const double pattern[5] = {7.0, 32.0, 12.0, 32.0, 7.0};
    const double h = t / intervals;
    Matrix sum = Matrix::Zero(A.rows(), A.cols());
    for (int base = 0; base < intervals; base += 4) {
      for (int i = 0; i < 5; ++i) {
        sum += pattern[i] * integrand((base + i) * h);
      }
    }
    return Matrix(sum * (2.0 * h / 45.0));
  };

  int intervals = 16;
  Matrix coarse = composite_boole(intervals);
  for (int level = 0; level < 16; ++level) {
    intervals *= 2;
    const Matrix fine = composite_boole(intervals);
    if ((fine - coarse).norm() <= rel_tol * std::max(1.0, fine.norm())) {
      return fine;
    }
    coarse = fine;
  }
  return coarse;
}

}  // namespace outctrl::test
