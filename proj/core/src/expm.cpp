#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "outctrl/numerics.hpp"

namespace outctrl {

namespace {

// 1-norm bounds under which a diagonal Pade approximant of the given degree
// reaches double-precision accuracy without scaling.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

double norm_l1(const Matrix& A) {
  return A.cwiseAbs().colwise().sum().maxCoeff();
}

// Fills U (odd part) and V (even part) of the degree-m approximant, so that
// the Pade numerator is V + U and the denominator is V - U.
void pade3(const Matrix& A, const Matrix& A2, Matrix& U, Matrix& V) {
  const double b[] = {120.0, 60.0, 12.0, 1.0};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  U = A * (b[3] * A2 + b[1] * I);
  V = b[2] * A2 + b[0] * I;
}

void pade5(const Matrix& A, const Matrix& A2, const Matrix& A4, Matrix& U,
           Matrix& V) {
  const double b[] = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  U = A * (b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade7(const Matrix& A, const Matrix& A2, const Matrix& A4,
           const Matrix& A6, Matrix& U, Matrix& V) {
  const double b[] = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                      25200.0,    1512.0,    56.0,      1.0};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  U = A * (b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade9(const Matrix& A, const Matrix& A2, const Matrix& A4,
           const Matrix& A6, Matrix& U, Matrix& V) {
  const double b[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                      30270240.0,    2162160.0,    110880.0,     3960.0,
                      90.0,          1.0};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  const Matrix A8 = A6 * A2;
  U = A * (b[9] * A8 + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
  V = b[8] * A8 + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
}

void pade13(const Matrix& A, const Matrix& A2, const Matrix& A4,
            const Matrix& A6, Matrix& U, Matrix& V) {
  const double b[] = {64764752532480000.0,
                      32382376266240000.0,
                      7771770303897600.0,
                      1187353796428800.0,
                      129060195264000.0,
                      10559470521600.0,
                      670442572800.0,
                      33522128640.0,
                      1323241920.0,
                      40840800.0,
                      960960.0,
                      16380.0,
                      182.0,
                      1.0};
  const Matrix I = Matrix::Identity(A.rows(), A.cols());
  // Horner-style grouping keeps the work at six matrix products.
  U = A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 +
           b[5] * A4 + b[3] * A2 + b[1] * I);
  V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 +
      b[2] * A2 + b[0] * I;
}

}  // namespace

Matrix expm(const Matrix& A) {
  if (A.rows() != A.cols()) {
    throw DimensionError("matrix exponential requires a square matrix");
  }
  const Eigen::Index n = A.rows();
  if (n == 0) return Matrix(0, 0);
  require_finite(A, "exponential operand");

  const double norm = norm_l1(A);
  Matrix U, V;
  int squarings = 0;

  if (norm <= kTheta9) {
    const Matrix A2 = A * A;
    if (norm <= kTheta3) {
      pade3(A, A2, U, V);
    } else if (norm <= kTheta5) {
      const Matrix A4 = A2 * A2;
      pade5(A, A2, A4, U, V);
    } else {
      const Matrix A4 = A2 * A2;
      const Matrix A6 = A4 * A2;
      if (norm <= kTheta7) {
        pade7(A, A2, A4, A6, U, V);
      } else {
        pade9(A, A2, A4, A6, U, V);
      }
    }
  } else {
    squarings = std::max(
        0, static_cast<int>(std::ceil(std::log2(norm / kTheta13))));
    const Matrix As = A / std::pow(2.0, squarings);
    const Matrix A2 = As * As;
    const Matrix A4 = A2 * A2;
    const Matrix A6 = A4 * A2;
    pade13(As, A2, A4, A6, U, V);
  }

  Matrix R = (V - U).partialPivLu().solve(V + U);
  for (int i = 0; i < squarings; ++i) R = R * R;
  return R;
}

Matrix state_gramian(const Matrix& A, const Matrix& B, double t) {
  if (A.rows() != A.cols()) {
    throw DimensionError("Gramian requires a square state matrix");
  }
  if (B.rows() != A.rows()) {
    throw DimensionError("Gramian input matrix has mismatched row count");
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw DomainError("Gramian horizon must be positive and finite");
  }
  require_finite(A, "A");
  require_finite(B, "B");

  const Eigen::Index n = A.rows();

  // Base step short enough that the block exponential stays well scaled;
  // the remaining factor of 2^k is recovered by Gramian doubling.
  const double norm_a = A.norm();
  int doublings = 0;
  if (norm_a * t > 2.0) {
    doublings = static_cast<int>(std::ceil(std::log2(norm_a * t / 2.0)));
  }
  const double tau = t / std::pow(2.0, doublings);

  Matrix H = Matrix::Zero(2 * n, 2 * n);
  H.topLeftCorner(n, n) = -A;
  H.topRightCorner(n, n) = B * B.adjoint();
  H.bottomRightCorner(n, n) = A.adjoint();
  const Matrix E = expm(H * tau);

  const Matrix F2 = E.bottomRightCorner(n, n);  // e^{tau A^*}
  const Matrix G1 = E.topRightCorner(n, n);     // e^{-tau A} P(tau)
  Matrix P = F2.adjoint() * G1;
  P = 0.5 * (P + P.adjoint()).eval();

  Matrix F = F2.adjoint();  // e^{tau A}
  for (int i = 0; i < doublings; ++i) {
    P = P + F * P * F.adjoint();
    P = 0.5 * (P + P.adjoint()).eval();
    if (i + 1 < doublings) F = F * F;
  }
  return P;
}

}  // namespace outctrl
