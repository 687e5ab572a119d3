#include "outctrl/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace outctrl {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

std::string dims_of(const Matrix& M) {
  std::ostringstream os;
  os << M.rows() << "x" << M.cols();
  return os.str();
}

}  // namespace

void require_finite(const Matrix& M, const char* name) {
  if (!M.allFinite()) {
    throw DomainError(std::string(name) + " contains non-finite entries");
  }
}

void ToleranceConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0) || !(v < 1.0)) {
      std::ostringstream os;
      os << name << " must lie in (0, 1), got " << v;
      throw DomainError(os.str());
    }
  };
  check(rank_rtol, "rank_rtol");
  check(eig_cluster_atol, "eig_cluster_atol");
  check(psd_atol, "psd_atol");
}

int Spectrum::total_multiplicity() const {
  int total = 0;
  for (const auto& c : clusters) total += c.multiplicity;
  return total;
}

double Spectrum::distance_to(const Complex& z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : clusters) best = std::min(best, std::abs(z - c.value));
  return best;
}

RankResult rank_of(const Matrix& M, const ToleranceConfig& tol,
                   double abs_floor) {
  tol.validate();
  if (abs_floor < 0.0 || !std::isfinite(abs_floor)) {
    throw DomainError("rank floor must be finite and non-negative");
  }
  RankResult out;
  if (M.size() == 0) {
    out.threshold = abs_floor;
    return out;
  }
  require_finite(M, "rank operand");

  Eigen::JacobiSVD<Matrix> svd(M);
  out.singular_values = svd.singularValues();
  const double sigma_max = out.singular_values(0);
  const double dim = static_cast<double>(std::max(M.rows(), M.cols()));
  out.threshold = std::max(tol.rank_rtol * dim * sigma_max, abs_floor);
  out.rank = static_cast<int>(
      (out.singular_values.array() > out.threshold).count());
  return out;
}

Spectrum spectrum_of(const Matrix& A, const ToleranceConfig& tol) {
  tol.validate();
  if (A.rows() != A.cols()) {
    throw DimensionError("spectrum requires a square matrix, got " +
                         dims_of(A));
  }
  Spectrum spec;
  const Eigen::Index n = A.rows();
  if (n == 0) return spec;
  require_finite(A, "spectrum operand");

  Eigen::ComplexEigenSolver<Matrix> es(A, /*computeEigenvectors=*/true);
  if (es.info() != Eigen::Success) {
    throw NumericError("eigenvalue iteration did not converge");
  }
  const Vector lambda = es.eigenvalues();
  const Matrix& V = es.eigenvectors();  // unit-norm columns

  const double norm_a = A.norm();
  const double scale = 1.0 + norm_a;

  // Per-eigenvalue first-order error estimate eps * |A|_F * kappa_i with
  // kappa_i = |row_i(V^-1)| * |col_i(V)|.  For a defective eigenvalue the
  // eigenvector matrix is (nearly) singular, kappa blows up, and the cap
  // below takes over; the cap is what bounds the cluster radius for Jordan
  // blocks whose computed eigenvalues scatter like eps^(1/k).
  RealVector delta(n);
  const double delta_cap = 0.02 * scale;
  Matrix v_inv;
  bool have_inverse = false;
  {
    Eigen::FullPivLU<Matrix> lu(V);
    if (lu.isInvertible()) {
      v_inv = lu.inverse();
      have_inverse = v_inv.allFinite();
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double kappa = 1.0 / kEps;
    if (have_inverse) {
      kappa = v_inv.row(i).norm() * V.col(i).norm();
      if (!std::isfinite(kappa)) kappa = 1.0 / kEps;
    }
    delta(i) = std::min(kEps * std::max(norm_a, 1.0) * kappa, delta_cap);
  }

  // Agglomerate until stable.  Weighted means keep the representative near
  // the center of a split multiple eigenvalue.
  struct Cluster {
    Complex value;
    int multiplicity;
    double uncertainty;
  };
  std::vector<Cluster> clusters;
  clusters.reserve(static_cast<size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    clusters.push_back({lambda(i), 1, delta(i)});
  }
  const double base_radius = tol.eig_cluster_atol * scale;
  bool merged = true;
  while (merged) {
    merged = false;
    for (size_t i = 0; i < clusters.size() && !merged; ++i) {
      for (size_t j = i + 1; j < clusters.size() && !merged; ++j) {
        const double gap = std::abs(clusters[i].value - clusters[j].value);
        const double radius = std::max(
            base_radius, clusters[i].uncertainty + clusters[j].uncertainty);
        if (gap <= radius) {
          const double wi = clusters[i].multiplicity;
          const double wj = clusters[j].multiplicity;
          Cluster joined;
          joined.value =
              (clusters[i].value * wi + clusters[j].value * wj) / (wi + wj);
          joined.multiplicity =
              clusters[i].multiplicity + clusters[j].multiplicity;
          joined.uncertainty =
              std::max(clusters[i].uncertainty +
                           std::abs(clusters[i].value - joined.value),
                       clusters[j].uncertainty +
                           std::abs(clusters[j].value - joined.value));
          clusters[i] = joined;
          clusters.erase(clusters.begin() + static_cast<ptrdiff_t>(j));
          merged = true;
        }
      }
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) {
              if (a.value.real() != b.value.real()) {
                return a.value.real() < b.value.real();
              }
              return a.value.imag() < b.value.imag();
            });

  spec.clusters.reserve(clusters.size());
  for (const auto& c : clusters) {
    spec.clusters.push_back({c.value, c.multiplicity, c.uncertainty});
  }

  // Residual-based backward error: max_i |A v_i - lambda_i v_i| over |A|_F.
  double max_residual = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    max_residual =
        std::max(max_residual, (A * V.col(i) - lambda(i) * V.col(i)).norm());
  }
  spec.backward_error = max_residual / std::max(1.0, norm_a);
  return spec;
}

ImageComparison image_equal(const Matrix& M1, const Matrix& M2,
                            const ToleranceConfig& tol) {
  tol.validate();
  if (M1.rows() != M2.rows()) {
    throw DimensionError("image comparison requires equal row counts, got " +
                         dims_of(M1) + " vs " + dims_of(M2));
  }
  ImageComparison out;
  const double angle_tol = 100.0 * std::sqrt(tol.rank_rtol);

  auto basis_of = [&tol](const Matrix& M, int& rank) -> Matrix {
    if (M.size() == 0) {
      rank = 0;
      return Matrix(M.rows(), 0);
    }
    require_finite(M, "image operand");
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
    const RealVector sv = svd.singularValues();
    const double cutoff = tol.rank_rtol *
                          static_cast<double>(std::max(M.rows(), M.cols())) *
                          (sv.size() > 0 ? sv(0) : 0.0);
    rank = static_cast<int>((sv.array() > cutoff).count());
    return svd.matrixU().leftCols(rank);
  };

  const Matrix u1 = basis_of(M1, out.rank_lhs);
  const Matrix u2 = basis_of(M2, out.rank_rhs);

  if (out.rank_lhs != out.rank_rhs) {
    out.equal = false;
    out.max_principal_angle = M_PI / 2.0;
    return out;
  }
  if (out.rank_lhs == 0) {  // both images trivial
    out.equal = true;
    out.max_principal_angle = 0.0;
    return out;
  }

  // Cosines of the principal angles are the singular values of U1^* U2.
  Eigen::JacobiSVD<Matrix> svd(u1.adjoint() * u2);
  const double smallest_cosine =
      std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  out.max_principal_angle = std::acos(smallest_cosine);
  out.equal = out.max_principal_angle <= angle_tol;
  return out;
}

HermitianSolveResult solve_hermitian(const Matrix& W, const Vector& rhs,
                                     const ToleranceConfig& tol) {
  tol.validate();
  if (W.rows() != W.cols()) {
    throw DimensionError("Hermitian solve requires a square matrix, got " +
                         dims_of(W));
  }
  if (rhs.size() != W.rows()) {
    std::ostringstream os;
    os << "right-hand side has length " << rhs.size() << ", expected "
       << W.rows();
    throw DimensionError(os.str());
  }
  require_finite(W, "W");
  require_finite(rhs, "rhs");
  if ((W - W.adjoint()).norm() > 1e-10 * (1.0 + W.norm())) {
    throw DomainError("matrix passed to Hermitian solve is not Hermitian");
  }

  const Matrix W_h = 0.5 * (W + W.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(W_h);
  if (es.info() != Eigen::Success) {
    throw NumericError("Hermitian eigenvalue iteration did not converge");
  }
  const RealVector lambda = es.eigenvalues();  // ascending
  const Matrix& Q = es.eigenvectors();
  const double spectral_scale =
      lambda.size() > 0
          ? std::max(std::abs(lambda(0)), std::abs(lambda(lambda.size() - 1)))
          : 0.0;
  const double cutoff = tol.psd_atol * (1.0 + spectral_scale);

  Vector y = Q.adjoint() * rhs;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(lambda(i)) > cutoff) {
      y(i) /= lambda(i);
    } else {
      y(i) = Complex(0.0, 0.0);
    }
  }
  HermitianSolveResult out;
  out.solution = Q * y;
  out.residual = (W_h * out.solution - rhs).norm();

  const double reachable = std::sqrt(tol.psd_atol) * (1.0 + rhs.norm());
  if (out.residual > reachable) {
    std::ostringstream os;
    os << "right-hand side is outside the range of the matrix (residual "
       << out.residual << " exceeds " << reachable << ")";
    throw TargetUnreachableError(os.str(), out.residual);
  }
  return out;
}

}  // namespace outctrl
